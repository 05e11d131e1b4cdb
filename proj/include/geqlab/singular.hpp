#ifndef GEQLAB_SINGULAR_HPP
#define GEQLAB_SINGULAR_HPP

#include "geqlab/chart.hpp"
#include "geqlab/common.hpp"
#include "geqlab/flow.hpp"
#include "geqlab/integrals.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace geq {

inline constexpr double kSingularTol = 1e-7;   // gradient-vanishing threshold
inline constexpr double kBifurcationTol = 1e-9;  // |Pi_i(lambda_i)| degeneracy

struct SingularWitness {
  int index;              // 1-based eigenvalue index
  std::string condition;  // which structural condition held
  double p_component;     // |p_i| after unit-speed normalization
  double grad_norm;       // max-abs of dI at t = lambda_i(x_i)
};

struct SingularReport {
  PhaseState state;
  bool dependent = false;  // independence rank below dim
  int rank = 0;
  std::vector<SingularWitness> witnesses;
};

nlohmann::json to_json(const SingularReport& report);

// Scans the differentials dI at the frozen eigenvalues of an LC model and
// reports which structural condition explains each vanishing one. The state
// is normalized to unit speed before thresholding.
SingularReport classify_singular(const ChartModel& model, const PhaseState& state,
                                 double tol = kSingularTol);

// Eigen-field of a constant eigenvalue, scaled so g(v_i, v_i) = |Pi_i(lambda_i)|
// and oriented by a positive i-th component. Rejects bifurcation points.
Vector killing_field(const ChartModel& model, const Vector& x, int i);

// J_i = g(v_i, xi); a linear-in-momenta integral whenever lambda_i is constant.
double linear_integral_J(const ChartModel& model, const PhaseState& state, int i);

// Max-abs component of the Lie derivative of g along v_i, with the field's
// derivatives taken by centered differences. Near zero iff v_i is Killing.
double killing_lie_residual(const ChartModel& model, const Vector& x, int i);

struct OrderingAudit {
  bool ordered;
  Vector margins;  // min over samples of lambda_{i+1} minus max of lambda_i
};

// Samples the chart and audits the global interleaving of the L-spectrum.
OrderingAudit ordering_audit(const ChartModel& model, int samples, std::uint64_t seed);

// Integrates the geodesic from (x0, xi0) and returns the largest |xi_i| seen.
// Rejects basepoints violating the isolation hypothesis
// max range(lambda_{i-1}) < lambda_i(x0) < min range(lambda_{i+1}),
// and initial conditions with xi_i != 0.
double confinement_test(const ChartModel& model, int i, const Vector& x0, const Vector& xi0,
                        const IntegratorConfig& config);

}  // namespace geq

#endif
