#include "geqlab/chart.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace geq {

Vector LCData::lambdas(const Vector& x) const {
  Vector lam(static_cast<int>(profiles.size()));
  for (int i = 0; i < lam.size(); ++i) lam[i] = profiles[i].value(x[i]);
  return lam;
}

Vector LCData::dlambdas(const Vector& x) const {
  Vector dlam(static_cast<int>(profiles.size()));
  for (int i = 0; i < dlam.size(); ++i) dlam[i] = profiles[i].slope(x[i]);
  return dlam;
}

namespace lcform {

double sign(int i) { return (i % 2 == 0) ? 1.0 : -1.0; }

Vector diag_g(const Vector& lam) {
  const int n = static_cast<int>(lam.size());
  Vector u(n);
  for (int i = 0; i < n; ++i) {
    double prod = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) prod *= lam[j] - lam[i];
    u[i] = sign(i) * prod;
  }
  return u;
}

Matrix diag_g_derivative(const Vector& lam, const Vector& dlam) {
  const int n = static_cast<int>(lam.size());
  Matrix du = Matrix::Zero(n, n);  // (k, i) = d_k g_ii
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (k != i) {
        double prod = 1.0;
        for (int j = 0; j < n; ++j)
          if (j != i && j != k) prod *= lam[j] - lam[i];
        du(k, i) = sign(i) * dlam[k] * prod;
      } else {
        double sum = 0.0;
        for (int m = 0; m < n; ++m) {
          if (m == i) continue;
          double prod = 1.0;
          for (int j = 0; j < n; ++j)
            if (j != i && j != m) prod *= lam[j] - lam[i];
          sum += prod;
        }
        du(i, i) = -sign(i) * dlam[i] * sum;
      }
    }
  }
  return du;
}

Vector rho(const Vector& lam) {
  const int n = static_cast<int>(lam.size());
  double prod_all = 1.0;
  for (int j = 0; j < n; ++j) prod_all *= lam[j];
  Vector r(n);
  for (int i = 0; i < n; ++i) r[i] = 1.0 / (prod_all * lam[i]);
  return r;
}

Matrix rho_derivative(const Vector& lam, const Vector& dlam) {
  const int n = static_cast<int>(lam.size());
  const Vector r = rho(lam);
  Matrix dr(n, n);  // (k, i) = d_k rho_i
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double logd = dlam[k] / lam[k];
      if (k == i) logd += dlam[i] / lam[i];
      dr(k, i) = -r[i] * logd;
    }
  return dr;
}

double pi_at(const Vector& lam, int i, double t) {
  double prod = 1.0;
  for (int j = 0; j < lam.size(); ++j)
    if (j != i) prod *= lam[j] - t;
  return prod;
}

double pi_prime_at(const Vector& lam, int i, double t) {
  double sum = 0.0;
  for (int r = 0; r < lam.size(); ++r) {
    if (r == i) continue;
    double prod = 1.0;
    for (int j = 0; j < lam.size(); ++j)
      if (j != i && j != r) prod *= lam[j] - t;
    sum -= prod;
  }
  return sum;
}

double pi_at_excluding(const Vector& lam, int i, int skip, double t) {
  double prod = 1.0;
  for (int j = 0; j < lam.size(); ++j)
    if (j != i && j != skip) prod *= lam[j] - t;
  return prod;
}

}  // namespace lcform

ChartModel::ChartModel(std::vector<double> lo, std::vector<double> hi,
                       std::vector<bool> periodic, MetricEvaluator g, MetricEvaluator gbar,
                       std::shared_ptr<const LCData> lc)
    : dim_(static_cast<int>(lo.size())),
      lo_(std::move(lo)),
      hi_(std::move(hi)),
      periodic_(std::move(periodic)),
      g_(std::move(g)),
      gbar_(std::move(gbar)),
      lc_(std::move(lc)) {
  if (dim_ < 1 || hi_.size() != lo_.size() || periodic_.size() != lo_.size())
    throw std::invalid_argument("ChartModel: inconsistent bounds");
  for (int i = 0; i < dim_; ++i)
    if (!(hi_[i] > lo_[i])) throw std::invalid_argument("ChartModel: empty axis interval");
}

const LCData& ChartModel::lc() const {
  if (!lc_) throw std::logic_error("ChartModel: not generated from profiles");
  return *lc_;
}

Vector ChartModel::wrap(const Vector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("wrap: wrong dimension");
  Vector y = x;
  for (int i = 0; i < dim_; ++i) {
    if (periodic_[i]) {
      const double len = hi_[i] - lo_[i];
      y[i] = lo_[i] + std::fmod(y[i] - lo_[i], len);
      if (y[i] < lo_[i]) y[i] += len;
    } else if (y[i] < lo_[i] || y[i] > hi_[i]) {
      std::ostringstream msg;
      msg << "coordinate " << i + 1 << " = " << y[i] << " outside non-periodic bounds ["
          << lo_[i] << ", " << hi_[i] << "]";
      throw std::domain_error(msg.str());
    }
  }
  return y;
}

Matrix ChartModel::metric(Which w, const Vector& x) const {
  return evaluator(w).value(wrap(x));
}

std::vector<Matrix> ChartModel::metric_derivative(Which w, const Vector& x) const {
  const Vector y = wrap(x);
  const MetricEvaluator& ev = evaluator(w);
  if (ev.derivative) return ev.derivative(y);
  // centered differences; the wrap inside value() rejects stencil points that
  // fall outside a non-periodic axis
  std::vector<Matrix> d(dim_);
  for (int k = 0; k < dim_; ++k) {
    const double h = kFdStep * axis_length(k);
    Vector xp = y, xm = y;
    xp[k] += h;
    xm[k] -= h;
    d[k] = (evaluator(w).value(wrap(xp)) - evaluator(w).value(wrap(xm))) / (2.0 * h);
  }
  return d;
}

double ChartModel::range_min() const {
  const LCData& d = lc();
  double m = d.profiles.front().lo;
  for (const auto& p : d.profiles) m = std::min(m, p.lo);
  return m;
}

double ChartModel::range_max() const {
  const LCData& d = lc();
  double m = d.profiles.front().hi;
  for (const auto& p : d.profiles) m = std::max(m, p.hi);
  return m;
}

namespace {

MetricEvaluator lc_g_evaluator(std::shared_ptr<const LCData> lc) {
  MetricEvaluator ev;
  ev.value = [lc](const Vector& x) {
    return Matrix(lcform::diag_g(lc->lambdas(x)).asDiagonal());
  };
  ev.derivative = [lc](const Vector& x) {
    const Vector lam = lc->lambdas(x);
    const Matrix du = lcform::diag_g_derivative(lam, lc->dlambdas(x));
    const int n = static_cast<int>(lam.size());
    std::vector<Matrix> d(n, Matrix::Zero(n, n));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) d[k](i, i) = du(k, i);
    return d;
  };
  return ev;
}

// gbar_ii = rho_i g_ii; flatten >= 0 replaces rho_{flatten} by 1.
MetricEvaluator lc_gbar_evaluator(std::shared_ptr<const LCData> lc, int flatten) {
  MetricEvaluator ev;
  ev.value = [lc, flatten](const Vector& x) {
    const Vector lam = lc->lambdas(x);
    Vector u = lcform::diag_g(lam);
    const Vector r = lcform::rho(lam);
    for (int i = 0; i < u.size(); ++i) u[i] *= (i == flatten) ? 1.0 : r[i];
    return Matrix(u.asDiagonal());
  };
  ev.derivative = [lc, flatten](const Vector& x) {
    const Vector lam = lc->lambdas(x);
    const Vector dlam = lc->dlambdas(x);
    const Vector u = lcform::diag_g(lam);
    const Vector r = lcform::rho(lam);
    const Matrix du = lcform::diag_g_derivative(lam, dlam);
    const Matrix dr = lcform::rho_derivative(lam, dlam);
    const int n = static_cast<int>(lam.size());
    std::vector<Matrix> d(n, Matrix::Zero(n, n));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        d[k](i, i) = (i == flatten) ? du(k, i) : r[i] * du(k, i) + u[i] * dr(k, i);
    return d;
  };
  return ev;
}

}  // namespace

ChartModel lc_generate(std::vector<ScalarProfile> profiles, std::vector<double> lo,
                       std::vector<double> hi, std::vector<bool> periodic) {
  const int n = static_cast<int>(profiles.size());
  if (n < 1) throw std::invalid_argument("lc_generate: need at least one profile");
  if (lo.size() != profiles.size() || hi.size() != profiles.size() ||
      periodic.size() != profiles.size())
    throw std::invalid_argument("lc_generate: bounds/periodic size mismatch");

  for (int i = 0; i < n; ++i) {
    if (!(profiles[i].lo <= profiles[i].hi))
      throw std::invalid_argument("lc_generate: invalid declared range on profile " +
                                  std::to_string(i + 1));
    if (profiles[i].lo <= 0.0)
      throw std::invalid_argument("lc_generate: non-positive eigenvalue profile " +
                                  std::to_string(i + 1));
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (!(profiles[i].hi < profiles[i + 1].lo)) {
      std::ostringstream msg;
      msg << "overlapping ranges (" << i + 1 << "," << i + 2 << ")";
      throw std::invalid_argument(msg.str());
    }
  }

  // Audit the declared ranges on a grid; exact range computation of an
  // arbitrary scalar map is not possible.
  constexpr int kAuditSamples = 10000;
  constexpr double kAuditSlack = 1e-9;
  for (int i = 0; i < n; ++i) {
    const double len = hi[i] - lo[i];
    for (int s = 0; s <= kAuditSamples; ++s) {
      const double x = lo[i] + len * s / kAuditSamples;
      const double v = profiles[i].value(x);
      if (v < profiles[i].lo - kAuditSlack || v > profiles[i].hi + kAuditSlack) {
        std::ostringstream msg;
        msg << "profile " << i + 1 << " leaves its declared range at x = " << x
            << " (value " << v << ")";
        throw std::invalid_argument(msg.str());
      }
    }
    if (periodic[i]) {
      const double a = profiles[i].value(lo[i]);
      const double b = profiles[i].value(hi[i]);
      if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a)))
        throw std::invalid_argument("lc_generate: profile " + std::to_string(i + 1) +
                                    " is not periodic on its periodic axis");
    }
  }

  auto lc = std::make_shared<LCData>();
  lc->profiles = std::move(profiles);
  return ChartModel(std::move(lo), std::move(hi), std::move(periodic), lc_g_evaluator(lc),
                    lc_gbar_evaluator(lc, -1), lc);
}

std::pair<Matrix, std::vector<Matrix>> metric_eval(const ChartModel& model, Which w,
                                                   const Vector& x) {
  return {model.metric(w, x), model.metric_derivative(w, x)};
}

std::vector<Matrix> christoffel(const ChartModel& model, Which w, const Vector& x) {
  const int n = model.dim();
  const Matrix G = model.metric(w, x);
  const std::vector<Matrix> dG = model.metric_derivative(w, x);
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("christoffel: metric not positive definite at point");
  std::vector<Matrix> gamma(n, Matrix::Zero(n, n));
  Vector w_vec(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      for (int l = 0; l < n; ++l) w_vec[l] = dG[i](l, j) + dG[j](l, i) - dG[l](i, j);
      const Vector col = 0.5 * llt.solve(w_vec);
      for (int k = 0; k < n; ++k) {
        gamma[k](i, j) = col[k];
        gamma[k](j, i) = col[k];
      }
    }
  return gamma;
}

SpdCheckResult spd_check(const ChartModel& model, Which w, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("spd_check: samples must be >= 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SpdCheckResult result{true, std::numeric_limits<double>::infinity(), Vector()};
  Vector x(model.dim());
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < model.dim(); ++i)
      x[i] = model.lower()[i] + model.axis_length(i) * unit(rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(model.metric(w, x), Eigen::EigenvaluesOnly);
    const double mineig = es.eigenvalues().minCoeff();
    if (mineig < result.min_eigenvalue) {
      result.min_eigenvalue = mineig;
      result.worst_point = x;
    }
  }
  result.positive_definite = result.min_eigenvalue > 0.0;
  return result;
}

ChartModel break_rho(const ChartModel& lc_model, int index) {
  const LCData& data = lc_model.lc();
  if (index < 0 || index >= lc_model.dim())
    throw std::invalid_argument("break_rho: index out of range");
  auto lc = std::make_shared<LCData>(data);
  // raw pair: the canonical structure no longer holds, so no LCData is attached
  return ChartModel(lc_model.lower(), lc_model.upper(), lc_model.periodic(),
                    lc_g_evaluator(lc), lc_gbar_evaluator(lc, index), nullptr);
}

ChartModel proportional_pair(const ChartModel& model, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("proportional_pair: c must be positive");
  MetricEvaluator g = model.evaluator(Which::g);
  MetricEvaluator gbar;
  gbar.value = [g, c](const Vector& x) { return Matrix(c * g.value(x)); };
  if (g.derivative)
    gbar.derivative = [g, c](const Vector& x) {
      std::vector<Matrix> d = g.derivative(x);
      for (auto& m : d) m *= c;
      return d;
    };
  return ChartModel(model.lower(), model.upper(), model.periodic(), g, gbar, nullptr);
}

}  // namespace geq
