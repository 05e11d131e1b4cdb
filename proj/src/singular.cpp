#include "geqlab/singular.hpp"

#include "geqlab/ltensor.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

namespace geq {

nlohmann::json to_json(const SingularReport& report) {
  nlohmann::json j;
  j["x"] = std::vector<double>(report.state.x.data(),
                               report.state.x.data() + report.state.x.size());
  j["p"] = std::vector<double>(report.state.p.data(),
                               report.state.p.data() + report.state.p.size());
  j["dependent"] = report.dependent;
  j["rank"] = report.rank;
  j["witnesses"] = nlohmann::json::array();
  for (const auto& w : report.witnesses)
    j["witnesses"].push_back({{"index", w.index},
                              {"condition", w.condition},
                              {"p_component", w.p_component},
                              {"grad_norm", w.grad_norm}});
  return j;
}

SingularReport classify_singular(const ChartModel& model, const PhaseState& state,
                                 double tol) {
  if (!model.is_lc())
    throw std::invalid_argument("classify_singular: supported for LC-generated models only");
  const int n = model.dim();
  const LCData& lc = model.lc();

  // unit-speed gauge so the tolerance has a fixed meaning
  PhaseState s{model.wrap(state.x), state.p};
  const double h0 = hamiltonian(model, s);
  if (h0 > 1e-300) s.p /= std::sqrt(2.0 * h0);

  SingularReport report;
  report.state = s;
  const Vector lam = lc.lambdas(s.x);
  const Vector dlam = lc.dlambdas(s.x);

  for (int i = 0; i < n; ++i) {
    const double grad_norm = grad_I(model, s, lam[i]).cwiseAbs().maxCoeff();
    if (grad_norm >= tol) continue;
    SingularWitness w;
    w.index = i + 1;
    w.grad_norm = grad_norm;
    w.p_component = std::abs(s.p[i]);
    if (lc.profiles[i].constant)
      w.condition = "removable (J_i regular)";
    else if (std::abs(dlam[i]) < tol)
      w.condition = "p_i = 0 & lambda_i' = 0";
    else if (std::abs(eval_I_prime(model, s, lam[i])) < tol)
      w.condition = "p_i = 0 & I'_{lambda_i} = 0";
    else
      w.condition = "unclassified";
    report.witnesses.push_back(w);
  }

  report.rank = independence_rank(model, s, chebyshev_nodes(model, n));
  report.dependent = report.rank < n;
  return report;
}

Vector killing_field(const ChartModel& model, const Vector& x, int i) {
  if (!model.is_lc())
    throw std::invalid_argument("killing_field: supported for LC-generated models only");
  const int n = model.dim();
  if (i < 0 || i >= n) throw std::invalid_argument("killing_field: index out of range");
  if (!model.lc().profiles[i].constant)
    throw std::invalid_argument("killing_field: eigenvalue profile " + std::to_string(i + 1) +
                                " is not flagged constant");
  const Vector y = model.wrap(x);
  const Vector lam = model.lc().lambdas(y);
  const double pi_i = lcform::pi_at(lam, i, lam[i]);
  if (std::abs(pi_i) < kBifurcationTol)
    throw std::domain_error("killing_field: degenerate point (|Pi_i(lambda_i)| below " +
                            fmt17(kBifurcationTol) + ")");

  const LTensorValue lt = compute_L(model, y);
  Vector v = lt.eigenbasis.col(i);     // g-orthonormal, so g(v, v) = 1
  v *= std::sqrt(std::abs(pi_i));
  if (v[i] < 0.0) v = -v;
  return v;
}

double linear_integral_J(const ChartModel& model, const PhaseState& state, int i) {
  const Vector v = killing_field(model, state.x, i);
  return v.dot(state.p);  // g(v, xi) = v . p
}

double killing_lie_residual(const ChartModel& model, const Vector& x, int i) {
  const int n = model.dim();
  const Vector y = model.wrap(x);
  const Vector v = killing_field(model, y, i);
  const Matrix G = model.metric(Which::g, y);
  const std::vector<Matrix> dG = model.metric_derivative(Which::g, y);

  Matrix dv(n, n);  // (k, m) = d_k v^m
  for (int k = 0; k < n; ++k) {
    const double h = 1e-5 * model.axis_length(k);
    Vector xp = y, xm = y;
    xp[k] += h;
    xm[k] -= h;
    dv.row(k) =
        ((killing_field(model, model.wrap(xp), i) - killing_field(model, model.wrap(xm), i)) /
         (2.0 * h))
            .transpose();
  }

  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      double lie = 0.0;
      for (int k = 0; k < n; ++k)
        lie += v[k] * dG[k](a, b) + G(k, b) * dv(a, k) + G(a, k) * dv(b, k);
      worst = std::max(worst, std::abs(lie));
    }
  return worst;
}

OrderingAudit ordering_audit(const ChartModel& model, int samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("ordering_audit: samples must be >= 2");
  const int n = model.dim();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Vector max_seen = Vector::Constant(n, -std::numeric_limits<double>::infinity());
  Vector min_seen = Vector::Constant(n, std::numeric_limits<double>::infinity());
  Vector x(n);
  for (int s = 0; s < samples; ++s) {
    for (int k = 0; k < n; ++k)
      x[k] = model.lower()[k] + model.axis_length(k) * unit(rng);
    const Vector ev = spectrum(model, x).eigenvalues;
    max_seen = max_seen.cwiseMax(ev);
    min_seen = min_seen.cwiseMin(ev);
  }

  OrderingAudit audit;
  audit.margins = Vector(std::max(0, n - 1));
  audit.ordered = true;
  for (int i = 0; i + 1 < n; ++i) {
    audit.margins[i] = min_seen[i + 1] - max_seen[i];
    if (audit.margins[i] < -kTolMult) audit.ordered = false;
  }
  return audit;
}

double confinement_test(const ChartModel& model, int i, const Vector& x0, const Vector& xi0,
                        const IntegratorConfig& config) {
  if (!model.is_lc())
    throw std::invalid_argument("confinement_test: supported for LC-generated models only");
  const int n = model.dim();
  if (i < 0 || i >= n) throw std::invalid_argument("confinement_test: index out of range");

  const Vector y0 = model.wrap(x0);
  const double lam_i = model.lc().profiles[i].value(y0[i]);
  if (i > 0 && !(model.lc().profiles[i - 1].hi < lam_i)) {
    std::ostringstream msg;
    msg << "confinement_test: hypothesis fails, max range(lambda_" << i << ") = "
        << model.lc().profiles[i - 1].hi << " is not below lambda_" << i + 1
        << "(basepoint) = " << lam_i;
    throw std::invalid_argument(msg.str());
  }
  if (i + 1 < n && !(lam_i < model.lc().profiles[i + 1].lo)) {
    std::ostringstream msg;
    msg << "confinement_test: hypothesis fails, lambda_" << i + 1 << "(basepoint) = "
        << lam_i << " is not below min range(lambda_" << i + 2 << ") = "
        << model.lc().profiles[i + 1].lo;
    throw std::invalid_argument(msg.str());
  }
  if (std::abs(xi0[i]) > 1e-12)
    throw std::invalid_argument("confinement_test: initial velocity must have xi_i = 0");

  const Observable gen = hamiltonian_observable(model);
  PhaseState s = state_from_velocity(model, y0, xi0);
  double worst = 0.0;
  for (long k = 0; k < config.steps; ++k) {
    s = symplectic_step(gen, s, config.h, config.fixed_point_tol,
                        config.fixed_point_max_iter);
    worst = std::max(worst, std::abs(velocity(model, s)[i]));
  }
  return worst;
}

}  // namespace geq
