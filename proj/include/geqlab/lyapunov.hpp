#ifndef GEQLAB_LYAPUNOV_HPP
#define GEQLAB_LYAPUNOV_HPP

#include "geqlab/chart.hpp"
#include "geqlab/common.hpp"
#include "geqlab/flow.hpp"
#include "geqlab/integrals.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace geq {

// Finite-time estimates of integrable flows decay like log(T)/T; the factor 5
// absorbs renormalization noise. Operational surrogate for entropy vanishing.
double entropy_threshold(double T);

struct LyapunovEstimate {
  double horizon = 0.0;          // integrated flow time
  double renorm_interval = 1.0;
  double exponent = 0.0;         // sum(growth_log) / horizon
  std::vector<double> growth_log;

  // exponent over the first `time` units of the same run
  double exponent_at(double time) const;

  // optional conservation monitoring along the run
  std::vector<std::string> monitor_names;
  Vector monitor_initial;
  Vector monitor_drift;  // max |f(t) - f(0)| over the run
};

// Integrates the tangent flow of `generator` from `start` (normalized to unit
// speed first), renormalizing delta each interval and accumulating log growth
// factors. Deterministic: no internal randomness.
LyapunovEstimate lyapunov_estimate(const ChartModel& model, const Observable& generator,
                                   const PhaseState& start, const Vector& delta0, double T,
                                   double renorm_interval, const IntegratorConfig& config,
                                   TangentMode mode = TangentMode::jacobian,
                                   const std::vector<Observable>& monitor = {});

// Convenience wrapper for the geodesic flow of g.
LyapunovEstimate lyapunov_estimate(const ChartModel& model, const PhaseState& start,
                                   const Vector& delta0, double T, double renorm_interval,
                                   const IntegratorConfig& config,
                                   TangentMode mode = TangentMode::jacobian);

enum class EntropyVerdict { consistent_with_zero_entropy, inconsistent, not_integrable_input };

std::string to_string(EntropyVerdict v);

struct EntropyMember {
  int index = 0;
  PhaseState initial;
  double exponent = 0.0;        // at the full horizon
  double exponent_early = 0.0;  // at the early checkpoint
  double max_drift = 0.0;       // worst relative drift among H and the I_t
};

struct EntropyReport {
  EntropyVerdict verdict = EntropyVerdict::inconsistent;
  double horizon = 0.0;
  double early_checkpoint = 0.0;
  double threshold = 0.0;
  double drift_gate = 0.0;
  std::vector<EntropyMember> members;
  int failing_member = -1;
  std::string detail;
  std::uint64_t seed = 0;
  IntegratorConfig config;
};

nlohmann::json to_json(const EntropyReport& report);

// Ensemble probe: verifies integrability first (brackets + conservation at the
// reference step size), then aggregates per-member finite-time exponents.
EntropyReport entropy_report(const ChartModel& model, int ensemble_size, double T,
                             std::uint64_t seed, const IntegratorConfig& config);

// Exponent along the combined flow of F = sum_j a_j I_{t_j}.
LyapunovEstimate pseudonorm_estimate(const ChartModel& model, const Vector& a,
                                     const Vector& t_list, double T,
                                     const IntegratorConfig& config,
                                     std::uint64_t seed = 0);

// Deterministic random unit-speed state / unit tangent displacement.
PhaseState random_unit_speed_state(const ChartModel& model, Rng& rng);
Vector random_unit_delta(int dim2n, Rng& rng);

}  // namespace geq

#endif
