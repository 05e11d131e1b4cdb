#include "geqlab/integrals.hpp"

#include "geqlab/ltensor.hpp"

#include <cmath>
#include <stdexcept>

namespace geq {

Vector velocity(const ChartModel& model, const PhaseState& state) {
  const Matrix G = model.metric(Which::g, state.x);
  return Eigen::LLT<Matrix>(G).solve(state.p);
}

PhaseState state_from_velocity(const ChartModel& model, const Vector& x, const Vector& xi) {
  return PhaseState{x, model.metric(Which::g, x) * xi};
}

double eval_I(const ChartModel& model, const PhaseState& state, double t) {
  const Matrix G = model.metric(Which::g, state.x);
  const Vector xi = Eigen::LLT<Matrix>(G).solve(state.p);
  const Matrix S = adjugate_S(model, state.x, t);
  return xi.dot(G * (S * xi));
}

double eval_I_lc(const ChartModel& model, const PhaseState& state, double t) {
  const LCData& lc = model.lc();
  const Vector x = model.wrap(state.x);
  const Vector lam = lc.lambdas(x);
  const Vector u = lcform::diag_g(lam);
  double sum = 0.0;
  for (int i = 0; i < lam.size(); ++i) {
    const double w = lcform::pi_at(lam, i, t);
    sum += w * state.p[i] * state.p[i] / u[i];  // xi_i = p_i / g_ii
  }
  return sum;
}

std::pair<double, double> reference_interval(const ChartModel& model) {
  if (model.is_lc()) return {model.range_min() - 1.0, model.range_max() + 1.0};
  // raw pairs carry no declared ranges; fall back to a fixed window
  return {-1.0, 1.0};
}

Vector chebyshev_nodes(const ChartModel& model, int k) {
  const auto [a, b] = reference_interval(model);
  Vector nodes(k);
  for (int j = 0; j < k; ++j) {
    const double theta = M_PI * (2.0 * j + 1.0) / (2.0 * k);
    nodes[k - 1 - j] = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(theta);
  }
  return nodes;
}

IntegralFamily poly_coefficients(const ChartModel& model, const PhaseState& state) {
  const int n = model.dim();
  const Vector nodes = chebyshev_nodes(model, n);
  Vector values(n);
  for (int k = 0; k < n; ++k) values[k] = eval_I(model, state, nodes[k]);

  Matrix vand(n, n);
  for (int k = 0; k < n; ++k) {
    double pw = 1.0;
    for (int j = 0; j < n; ++j) {
      vand(k, j) = pw;
      pw *= nodes[k];
    }
  }
  IntegralFamily fam;
  fam.coefficients = vand.partialPivLu().solve(values);
  fam.refit_residual = (vand * fam.coefficients - values).cwiseAbs().maxCoeff();
  return fam;
}

double eval_I_prime(const ChartModel& model, const PhaseState& state, double t) {
  const IntegralFamily fam = poly_coefficients(model, state);
  double d = 0.0, pw = 1.0;
  for (int k = 1; k < fam.coefficients.size(); ++k) {
    d += k * fam.coefficients[k] * pw;
    pw *= t;
  }
  return d;
}

namespace {

Vector grad_I_lc(const ChartModel& model, const PhaseState& state, double t) {
  const LCData& lc = model.lc();
  const int n = model.dim();
  const Vector x = model.wrap(state.x);
  const Vector lam = lc.lambdas(x);
  const Vector dlam = lc.dlambdas(x);
  const Vector u = lcform::diag_g(lam);
  const Matrix du = lcform::diag_g_derivative(lam, dlam);

  Vector grad = Vector::Zero(2 * n);
  for (int i = 0; i < n; ++i) {
    const double w = lcform::pi_at(lam, i, t);
    const double pi = state.p[i];
    grad[n + i] = 2.0 * w * pi / u[i];
    for (int k = 0; k < n; ++k) {
      const double dw =
          (k == i) ? 0.0 : dlam[k] * lcform::pi_at_excluding(lam, i, k, t);
      grad[k] += pi * pi * (dw * u[i] - w * du(k, i)) / (u[i] * u[i]);
    }
  }
  return grad;
}

}  // namespace

Vector grad_I_fd(const ChartModel& model, const PhaseState& state, double t) {
  const int n = model.dim();
  Vector grad(2 * n);
  auto value_at = [&](const Vector& x, const Vector& p) {
    return eval_I(model, PhaseState{x, p}, t);
  };
  auto central = [&](int slot, double h) {
    PhaseState sp = state, sm = state;
    if (slot < n) {
      sp.x[slot] += h;
      sm.x[slot] -= h;
    } else {
      sp.p[slot - n] += h;
      sm.p[slot - n] -= h;
    }
    return (value_at(sp.x, sp.p) - value_at(sm.x, sm.p)) / (2.0 * h);
  };
  for (int s = 0; s < 2 * n; ++s) {
    const double d1 = central(s, kGradFdStep);
    const double d2 = central(s, 0.5 * kGradFdStep);
    grad[s] = (4.0 * d2 - d1) / 3.0;  // Richardson step check folded in
  }
  return grad;
}

Vector grad_I(const ChartModel& model, const PhaseState& state, double t) {
  if (model.is_lc()) return grad_I_lc(model, state, t);
  return grad_I_fd(model, state, t);
}

Observable hamiltonian_observable(const ChartModel& model, Which w) {
  Observable obs;
  obs.name = (w == Which::g) ? "H" : "Hbar";
  const ChartModel* m = &model;
  obs.value = [m, w](const PhaseState& s) {
    const Matrix G = m->metric(w, s.x);
    return 0.5 * s.p.dot(Eigen::LLT<Matrix>(G).solve(s.p));
  };
  obs.gradient = [m, w](const PhaseState& s) {
    const int n = m->dim();
    const Matrix G = m->metric(w, s.x);
    const std::vector<Matrix> dG = m->metric_derivative(w, s.x);
    const Vector xi = Eigen::LLT<Matrix>(G).solve(s.p);
    Vector grad(2 * n);
    for (int k = 0; k < n; ++k) grad[k] = -0.5 * xi.dot(dG[k] * xi);
    grad.tail(n) = xi;
    return grad;
  };
  return obs;
}

Observable integral_observable(const ChartModel& model, double t) {
  Observable obs;
  obs.name = "I[" + fmt17(t) + "]";
  const ChartModel* m = &model;
  if (m->is_lc())
    obs.value = [m, t](const PhaseState& s) { return eval_I_lc(*m, s, t); };
  else
    obs.value = [m, t](const PhaseState& s) { return eval_I(*m, s, t); };
  obs.gradient = [m, t](const PhaseState& s) { return grad_I(*m, s, t); };
  return obs;
}

Observable combined_observable(const ChartModel& model, const Vector& a,
                               const Vector& t_list) {
  if (a.size() != t_list.size())
    throw std::invalid_argument("combined_observable: coefficient/node size mismatch");
  std::vector<Observable> parts;
  for (int j = 0; j < t_list.size(); ++j)
    parts.push_back(integral_observable(model, t_list[j]));
  Observable obs;
  obs.name = "F";
  obs.value = [parts, a](const PhaseState& s) {
    double v = 0.0;
    for (int j = 0; j < a.size(); ++j) v += a[j] * parts[j].value(s);
    return v;
  };
  obs.gradient = [parts, a](const PhaseState& s) {
    Vector g = a[0] * parts[0].gradient(s);
    for (int j = 1; j < a.size(); ++j) g += a[j] * parts[j].gradient(s);
    return g;
  };
  return obs;
}

double poisson_bracket(const Observable& f, const Observable& g, const PhaseState& state) {
  const Vector df = f.gradient(state);
  const Vector dg = g.gradient(state);
  const int n = static_cast<int>(df.size()) / 2;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += df[k] * dg[n + k] - df[n + k] * dg[k];
  return sum;
}

int independence_rank(const ChartModel& model, const PhaseState& state,
                      const Vector& t_list) {
  const int n = model.dim();
  if (t_list.size() != n)
    throw std::invalid_argument("independence_rank: need exactly dim reference t values");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(t_list[i] - t_list[j]) < 1e-12)
        throw std::invalid_argument("independence_rank: repeated t values");

  Matrix rows(n, 2 * n);
  for (int i = 0; i < n; ++i) rows.row(i) = grad_I(model, state, t_list[i]).transpose();
  Eigen::JacobiSVD<Matrix> svd(rows);
  const Vector sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > kRankThreshold * sv[0]) ++rank;
  return rank;
}

}  // namespace geq
