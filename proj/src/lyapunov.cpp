#include "geqlab/lyapunov.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>
#include <thread>

namespace geq {

double entropy_threshold(double T) { return 5.0 * std::log(T) / T; }

double LyapunovEstimate::exponent_at(double time) const {
  const long k = std::lround(std::floor(time / renorm_interval + 1e-9));
  const long use = std::min<long>(k, static_cast<long>(growth_log.size()));
  if (use <= 0) return 0.0;
  double sum = 0.0;
  for (long i = 0; i < use; ++i) sum += growth_log[i];
  return sum / (use * renorm_interval);
}

PhaseState random_unit_speed_state(const ChartModel& model, Rng& rng) {
  const int n = model.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector x(n), xi(n);
  for (int i = 0; i < n; ++i) x[i] = model.lower()[i] + model.axis_length(i) * unit(rng);
  for (int i = 0; i < n; ++i) xi[i] = gauss(rng);
  const Matrix G = model.metric(Which::g, x);
  xi /= std::sqrt(xi.dot(G * xi));
  return PhaseState{x, G * xi};
}

Vector random_unit_delta(int dim2n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector d(dim2n);
  for (int i = 0; i < dim2n; ++i) d[i] = gauss(rng);
  return d / d.norm();
}

LyapunovEstimate lyapunov_estimate(const ChartModel& model, const Observable& generator,
                                   const PhaseState& start, const Vector& delta0, double T,
                                   double renorm_interval, const IntegratorConfig& config,
                                   TangentMode mode, const std::vector<Observable>& monitor) {
  if (!(T > 0.0)) throw std::invalid_argument("lyapunov_estimate: horizon must be > 0");
  if (delta0.norm() == 0.0)
    throw std::invalid_argument("lyapunov_estimate: delta0 must be nonzero");

  // unit-speed gauge: exponents scale with speed
  TangentState ts;
  ts.state = PhaseState{start.x, start.p};
  const double h0 = hamiltonian(model, ts.state);
  if (!(h0 > 0.0)) throw std::invalid_argument("lyapunov_estimate: start must have p != 0");
  ts.state.p /= std::sqrt(2.0 * h0);
  ts.delta = delta0 / delta0.norm();

  const long steps_per_interval = std::max<long>(1, std::lround(renorm_interval / config.h));
  const double interval = steps_per_interval * config.h;
  const long intervals = std::max<long>(1, std::lround(T / interval));

  LyapunovEstimate est;
  est.renorm_interval = interval;
  est.growth_log.reserve(intervals);
  for (const auto& obs : monitor) est.monitor_names.push_back(obs.name);
  est.monitor_initial = Vector(static_cast<int>(monitor.size()));
  est.monitor_drift = Vector::Zero(static_cast<int>(monitor.size()));
  for (std::size_t i = 0; i < monitor.size(); ++i)
    est.monitor_initial[static_cast<int>(i)] = monitor[i].value(ts.state);

  for (long block = 0; block < intervals; ++block) {
    for (long s = 0; s < steps_per_interval; ++s)
      ts = tangent_step(generator, ts, config.h, config, mode);
    const double growth = ts.delta.norm();
    est.growth_log.push_back(std::log(growth));
    ts.delta /= growth;
    for (std::size_t i = 0; i < monitor.size(); ++i) {
      const double drift =
          std::abs(monitor[i].value(ts.state) - est.monitor_initial[static_cast<int>(i)]);
      est.monitor_drift[static_cast<int>(i)] =
          std::max(est.monitor_drift[static_cast<int>(i)], drift);
    }
  }
  est.horizon = intervals * interval;
  double sum = 0.0;
  for (double gl : est.growth_log) sum += gl;
  est.exponent = sum / est.horizon;
  return est;
}

LyapunovEstimate lyapunov_estimate(const ChartModel& model, const PhaseState& start,
                                   const Vector& delta0, double T, double renorm_interval,
                                   const IntegratorConfig& config, TangentMode mode) {
  return lyapunov_estimate(model, hamiltonian_observable(model), start, delta0, T,
                           renorm_interval, config, mode);
}

std::string to_string(EntropyVerdict v) {
  switch (v) {
    case EntropyVerdict::consistent_with_zero_entropy:
      return "CONSISTENT_WITH_ZERO_ENTROPY";
    case EntropyVerdict::inconsistent:
      return "INCONSISTENT";
    case EntropyVerdict::not_integrable_input:
      return "NOT_INTEGRABLE_INPUT";
  }
  return "UNKNOWN";
}

namespace {

// Runs fn(i) for i in [0, count); spreads over hardware threads when present.
void parallel_for(int count, const std::function<void(int)>& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  if (hw <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  const unsigned use = std::min<unsigned>(hw, static_cast<unsigned>(count));
  pool.reserve(use);
  for (unsigned t = 0; t < use; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

struct IntegrabilityPrecheck {
  bool passed;
  std::string detail;
};

// Brackets at random unit-speed states plus a reference-step conservation run.
IntegrabilityPrecheck integrability_precheck(const ChartModel& model, std::uint64_t seed) {
  const int n = model.dim();
  const Vector t_list = chebyshev_nodes(model, n);
  std::vector<Observable> family;
  family.push_back(hamiltonian_observable(model));
  for (int j = 0; j < n; ++j) family.push_back(integral_observable(model, t_list[j]));

  const double bracket_tol = model.is_lc() ? 1e-9 : 1e-6;
  Rng rng(seed ^ hash_name("entropy_precheck"));
  double worst_bracket = 0.0;
  for (int s = 0; s < 100; ++s) {
    const PhaseState state = random_unit_speed_state(model, rng);
    for (std::size_t a = 0; a < family.size(); ++a)
      for (std::size_t b = a + 1; b < family.size(); ++b)
        worst_bracket =
            std::max(worst_bracket, std::abs(poisson_bracket(family[a], family[b], state)));
  }
  if (worst_bracket > bracket_tol)
    return {false, "bracket residual " + fmt17(worst_bracket) + " exceeds " +
                       fmt17(bracket_tol)};

  IntegratorConfig ref;
  ref.h = 1e-3;
  ref.steps = 10000;
  ref.record_stride = 10;
  const PhaseState s0 = random_unit_speed_state(model, rng);
  const Trajectory traj = integrate(model, s0, ref, family);
  if (!traj.completed) return {false, "conservation run aborted: " + traj.error};
  const Vector first = traj.observables.front();
  double worst_drift = 0.0;
  for (const Vector& vals : traj.observables)
    for (int k = 0; k < vals.size(); ++k)
      worst_drift = std::max(
          worst_drift, std::abs(vals[k] - first[k]) / std::max(std::abs(first[k]), 1e-3));
  if (worst_drift > 1e-5)
    return {false,
            "conservation drift " + fmt17(worst_drift) + " exceeds 1e-05 at h = 0.001"};
  return {true, ""};
}

}  // namespace

EntropyReport entropy_report(const ChartModel& model, int ensemble_size, double T,
                             std::uint64_t seed, const IntegratorConfig& config) {
  if (ensemble_size < 1)
    throw std::invalid_argument("entropy_report: ensemble size must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("entropy_report: horizon must be > 0");

  EntropyReport report;
  report.horizon = T;
  report.early_checkpoint = std::min(100.0, T);
  report.threshold = entropy_threshold(T);
  // second-order scheme envelope for the coarse-step monitoring drift
  report.drift_gate = std::max(1e-5, 100.0 * config.h * config.h);
  report.seed = seed;
  report.config = config;

  const IntegrabilityPrecheck pre = integrability_precheck(model, seed);
  if (!pre.passed) {
    report.verdict = EntropyVerdict::not_integrable_input;
    report.detail = pre.detail;
    return report;
  }

  const int n = model.dim();
  const Vector t_list = chebyshev_nodes(model, n);
  std::vector<Observable> monitor;
  monitor.push_back(hamiltonian_observable(model));
  for (int j = 0; j < n; ++j) monitor.push_back(integral_observable(model, t_list[j]));

  report.members.resize(ensemble_size);
  parallel_for(ensemble_size, [&](int i) {
    Rng rng(seed + 1000003ull * (static_cast<std::uint64_t>(i) + 1));
    const PhaseState start = random_unit_speed_state(model, rng);
    const Vector delta0 = random_unit_delta(2 * n, rng);
    const LyapunovEstimate est = lyapunov_estimate(
        model, hamiltonian_observable(model), start, delta0, T, 1.0, config,
        TangentMode::jacobian, monitor);
    EntropyMember m;
    m.index = i;
    m.initial = start;
    m.exponent = est.exponent;
    m.exponent_early = est.exponent_at(report.early_checkpoint);
    double drift = 0.0;
    for (int k = 0; k < est.monitor_drift.size(); ++k)
      drift = std::max(drift, est.monitor_drift[k] /
                                  std::max(std::abs(est.monitor_initial[k]), 1e-3));
    m.max_drift = drift;
    report.members[i] = m;
  });

  report.verdict = EntropyVerdict::consistent_with_zero_entropy;
  for (const auto& m : report.members) {
    if (m.exponent >= report.threshold) {
      report.verdict = EntropyVerdict::inconsistent;
      report.failing_member = m.index;
      report.detail = "member " + std::to_string(m.index) + " exponent " +
                      fmt17(m.exponent) + " >= threshold " + fmt17(report.threshold);
      break;
    }
    if (m.max_drift >= report.drift_gate) {
      report.verdict = EntropyVerdict::inconsistent;
      report.failing_member = m.index;
      report.detail = "member " + std::to_string(m.index) + " conservation drift " +
                      fmt17(m.max_drift) + " >= gate " + fmt17(report.drift_gate);
      break;
    }
  }
  return report;
}

nlohmann::json to_json(const EntropyReport& report) {
  nlohmann::json j;
  j["verdict"] = to_string(report.verdict);
  j["horizon"] = report.horizon;
  j["early_checkpoint"] = report.early_checkpoint;
  j["threshold"] = report.threshold;
  j["drift_gate"] = report.drift_gate;
  j["seed"] = report.seed;
  j["detail"] = report.detail;
  j["failing_member"] = report.failing_member;
  j["config"] = {{"h", report.config.h},
                 {"steps", report.config.steps},
                 {"fixed_point_tol", report.config.fixed_point_tol},
                 {"fixed_point_max_iter", report.config.fixed_point_max_iter},
                 {"record_stride", report.config.record_stride}};
  j["members"] = nlohmann::json::array();
  for (const auto& m : report.members) {
    nlohmann::json jm;
    jm["index"] = m.index;
    jm["exponent"] = m.exponent;
    jm["exponent_early"] = m.exponent_early;
    jm["max_drift"] = m.max_drift;
    jm["x"] = std::vector<double>(m.initial.x.data(), m.initial.x.data() + m.initial.x.size());
    jm["p"] = std::vector<double>(m.initial.p.data(), m.initial.p.data() + m.initial.p.size());
    j["members"].push_back(jm);
  }
  return j;
}

LyapunovEstimate pseudonorm_estimate(const ChartModel& model, const Vector& a,
                                     const Vector& t_list, double T,
                                     const IntegratorConfig& config, std::uint64_t seed) {
  if (a.isZero(0.0))
    throw std::invalid_argument("pseudonorm_estimate: coefficient vector must be nonzero");
  for (int i = 0; i < t_list.size(); ++i)
    for (int j = i + 1; j < t_list.size(); ++j)
      if (std::abs(t_list[i] - t_list[j]) < 1e-12)
        throw std::invalid_argument("pseudonorm_estimate: repeated t values");

  Rng rng(seed ^ hash_name("pseudonorm"));
  const PhaseState start = random_unit_speed_state(model, rng);
  const Vector delta0 = random_unit_delta(2 * model.dim(), rng);
  const Observable gen = combined_observable(model, a, t_list);
  return lyapunov_estimate(model, gen, start, delta0, T, 1.0, config);
}

}  // namespace geq
