#include "geqlab/ltensor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace geq {

LTensorValue compute_L(const ChartModel& model, const Vector& x) {
  const int n = model.dim();
  const Vector y = model.wrap(x);
  const Matrix G = model.metric(Which::g, y);
  const Matrix Gbar = model.metric(Which::gbar, y);

  Eigen::LLT<Matrix> llt_gbar(Gbar);
  Eigen::LLT<Matrix> llt_g(G);
  if (llt_gbar.info() != Eigen::Success || llt_g.info() != Eigen::Success)
    throw std::runtime_error("compute_L: metric not positive definite at point");

  const Matrix A = llt_gbar.solve(G);  // gbar^{-1} g
  const double det_ratio = 1.0 / A.determinant();  // det(gbar)/det(g)
  if (!(det_ratio > 0.0))
    throw std::runtime_error("compute_L: non-positive determinant ratio");
  const double c = std::pow(det_ratio, 1.0 / (n + 1));

  LTensorValue out;
  out.L = c * A;

  // congruence K = R L R^{-1} with G = R^T R is symmetric since L is
  // g-self-adjoint; eigenvectors map back as R^{-1} Q and stay g-orthonormal
  const Matrix R = Matrix(llt_g.matrixL()).transpose();
  const Matrix Rinv = R.triangularView<Eigen::Upper>().solve(Matrix::Identity(n, n));
  Matrix K = R * out.L * Rinv;
  K = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(K);
  if (es.info() != Eigen::Success) throw std::runtime_error("compute_L: eigensolver failed");
  out.eigenvalues = es.eigenvalues();
  out.eigenbasis = Rinv * es.eigenvectors();

  const Matrix GL = G * out.L;
  out.sym_residual = (GL - GL.transpose()).cwiseAbs().maxCoeff();
  return out;
}

bool SpectrumSample::simple() const {
  for (bool f : coincident)
    if (f) return false;
  return true;
}

SpectrumSample spectrum(const ChartModel& model, const Vector& x) {
  SpectrumSample s;
  s.point = model.wrap(x);
  s.eigenvalues = compute_L(model, x).eigenvalues;
  s.coincident.resize(model.dim() > 0 ? model.dim() - 1 : 0);
  for (int i = 0; i + 1 < model.dim(); ++i)
    s.coincident[i] = std::abs(s.eigenvalues[i + 1] - s.eigenvalues[i]) < kTolMult;
  return s;
}

namespace {

double det_small(const Matrix& m) {
  switch (m.rows()) {
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return m.determinant();
  }
}

Matrix minor_of(const Matrix& m, int row, int col) {
  const int n = static_cast<int>(m.rows());
  Matrix sub(n - 1, n - 1);
  for (int i = 0, si = 0; i < n; ++i) {
    if (i == row) continue;
    for (int j = 0, sj = 0; j < n; ++j) {
      if (j == col) continue;
      sub(si, sj) = m(i, j);
      ++sj;
    }
    ++si;
  }
  return sub;
}

Matrix adjugate_cofactor(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  Matrix adj(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double cof = ((i + j) % 2 == 0 ? 1.0 : -1.0) * det_small(minor_of(m, i, j));
      adj(j, i) = cof;  // transpose of the cofactor matrix
    }
  return adj;
}

// B_k = M B_{k-1} + c_k Id with c_k = -tr(M B_{k-1}) / k; adj = (-1)^{n-1} B_{n-1}
Matrix adjugate_faddeev(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  Matrix b = Matrix::Identity(n, n);
  for (int k = 1; k < n; ++k) {
    const Matrix a = m * b;
    const double c = -a.trace() / k;
    b = a + c * Matrix::Identity(n, n);
  }
  return (n % 2 == 1 ? 1.0 : -1.0) * b;
}

}  // namespace

Matrix adjugate(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("adjugate: square matrix required");
  const int n = static_cast<int>(m.rows());
  if (n == 1) return Matrix::Ones(1, 1);
  if (n <= 4) return adjugate_cofactor(m);
  return adjugate_faddeev(m);
}

Matrix adjugate_S(const ChartModel& model, const Vector& x, double t) {
  const LTensorValue lt = compute_L(model, x);
  const int n = model.dim();
  return adjugate(lt.L - t * Matrix::Identity(n, n));
}

double nijenhuis_torsion(const ChartModel& model, const Vector& x) {
  const int n = model.dim();
  const Vector y = model.wrap(x);
  const Matrix L = compute_L(model, y).L;

  std::vector<Matrix> dL(n);
  for (int k = 0; k < n; ++k) {
    const double h = 1e-5 * model.axis_length(k);
    Vector xp = y, xm = y;
    xp[k] += h;
    xm[k] -= h;
    // wrap() rejects stencil points beyond a non-periodic boundary
    dL[k] = (compute_L(model, model.wrap(xp)).L - compute_L(model, model.wrap(xm)).L) /
            (2.0 * h);
  }

  // N^k_ij = L^m_i d_m L^k_j - L^m_j d_m L^k_i + L^k_m (d_j L^m_i - d_i L^m_j)
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int m = 0; m < n; ++m) {
          v += L(m, i) * dL[m](k, j) - L(m, j) * dL[m](k, i);
          v += L(k, m) * (dL[j](m, i) - dL[i](m, j));
        }
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

NonPropResult strict_nonprop(const ChartModel& model, const Vector& x) {
  const Vector y = model.wrap(x);
  const Matrix G = model.metric(Which::g, y);
  const Matrix Gbar = model.metric(Which::gbar, y);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(G, Gbar);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("strict_nonprop: generalized eigensolver failed");
  NonPropResult out;
  out.roots = es.eigenvalues();
  const int n = model.dim();
  out.gaps = Vector(std::max(0, n - 1));
  out.strict = true;
  for (int i = 0; i + 1 < n; ++i) {
    out.gaps[i] = out.roots[i + 1] - out.roots[i];
    if (out.gaps[i] < kTolMult) out.strict = false;
  }
  return out;
}

LeafRestriction leaf_restriction(const ChartModel& model, const std::vector<int>& axes,
                                 const Vector& basepoint) {
  if (!model.is_lc())
    throw std::invalid_argument("leaf_restriction: model must be generated from profiles");
  const int n = model.dim();
  std::set<int> kept(axes.begin(), axes.end());
  if (kept.size() != axes.size())
    throw std::invalid_argument("leaf_restriction: repeated axis index");
  if (kept.empty() || static_cast<int>(kept.size()) == n)
    throw std::invalid_argument("leaf_restriction: axes must be a proper nonempty subset");
  for (int a : kept)
    if (a < 0 || a >= n) throw std::invalid_argument("leaf_restriction: axis out of range");

  const Vector x0 = model.wrap(basepoint);
  const Vector lam = model.lc().lambdas(x0);
  for (int a : kept)
    for (int b = 0; b < n; ++b)
      if (!kept.count(b) && std::abs(lam[a] - lam[b]) < kTolMult) {
        std::ostringstream msg;
        msg << "leaf_restriction: eigenvalue coincidence across the leaf boundary ("
            << a + 1 << "," << b + 1 << ")";
        throw std::invalid_argument(msg.str());
      }

  const int m = static_cast<int>(kept.size());
  std::vector<int> ax(kept.begin(), kept.end());

  auto lift = [x0, ax](const Vector& yv) {
    Vector full = x0;
    for (int j = 0; j < static_cast<int>(ax.size()); ++j) full[ax[j]] = yv[j];
    return full;
  };
  auto restrict_eval = [&](Which w) {
    const MetricEvaluator base = model.evaluator(w);
    MetricEvaluator ev;
    ev.value = [base, lift, ax, m](const Vector& yv) {
      const Matrix full = base.value(lift(yv));
      Matrix sub(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) sub(i, j) = full(ax[i], ax[j]);
      return sub;
    };
    if (base.derivative)
      ev.derivative = [base, lift, ax, m](const Vector& yv) {
        const std::vector<Matrix> full = base.derivative(lift(yv));
        std::vector<Matrix> sub(m, Matrix(m, m));
        for (int k = 0; k < m; ++k)
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) sub[k](i, j) = full[ax[k]](ax[i], ax[j]);
        return sub;
      };
    return ev;
  };

  std::vector<double> lo(m), hi(m);
  std::vector<bool> per(m);
  for (int j = 0; j < m; ++j) {
    lo[j] = model.lower()[ax[j]];
    hi[j] = model.upper()[ax[j]];
    per[j] = model.periodic()[ax[j]];
  }

  LeafRestriction out{
      ChartModel(std::move(lo), std::move(hi), std::move(per), restrict_eval(Which::g),
                 restrict_eval(Which::gbar), nullptr),
      ax, x0, 1.0, Vector(m)};
  for (int b = 0; b < n; ++b)
    if (!kept.count(b)) out.leaf_constant *= lam[b];
  const double scale = std::pow(out.leaf_constant, 1.0 / (m + 1));
  for (int j = 0; j < m; ++j) out.expected_spectrum[j] = scale * lam[ax[j]];
  return out;
}

}  // namespace geq
