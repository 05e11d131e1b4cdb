#ifndef GEQLAB_FLOW_HPP
#define GEQLAB_FLOW_HPP

#include "geqlab/chart.hpp"
#include "geqlab/common.hpp"
#include "geqlab/integrals.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace geq {

struct IntegratorConfig {
  double h = 1e-3;                // step in flow time
  long steps = 100000;
  double fixed_point_tol = 1e-13;
  int fixed_point_max_iter = 50;
  int record_stride = 100;
};

struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Trajectory {
  std::vector<double> times;               // strictly increasing, spacing h * stride
  std::vector<PhaseState> states;          // wrapped coordinates
  std::vector<std::string> observable_names;
  std::vector<Vector> observables;         // one entry per recorded sample
  bool completed = true;
  std::string error;

  std::string to_csv() const;  // header t,x1..xn,p1..pn,<observables>
};

// H(x, p) = 1/2 p . g^{-1}(x) p
double hamiltonian(const ChartModel& model, const PhaseState& state, Which w = Which::g);

// One implicit-midpoint step of the Hamiltonian flow of `generator`:
// second order, symplectic, time reversible, valid for non-separable
// Hamiltonians. Stage equation solved by fixed-point iteration.
PhaseState symplectic_step(const Observable& generator, const PhaseState& state, double h,
                           double fixed_point_tol = 1e-13, int max_iter = 50);

// Integrates the flow of an arbitrary generator, recording `record`
// observables every record_stride steps. A step failure stops the run and
// returns the partial trajectory with `completed = false`.
Trajectory flow_trajectory(const Observable& generator, const ChartModel& model,
                           const PhaseState& start, const IntegratorConfig& config,
                           const std::vector<Observable>& record);

// Geodesic flow of the selected metric.
Trajectory integrate(const ChartModel& model, const PhaseState& start,
                     const IntegratorConfig& config, const std::vector<Observable>& record,
                     Which w = Which::g);

// Endpoint of the time-`time` Hamiltonian flow of F = sum_j a_j I_{t_j}.
PhaseState combined_flow(const ChartModel& model, const PhaseState& start, const Vector& a,
                         const Vector& t_list, double time, const IntegratorConfig& config);

struct ReparamResult {
  double residual;       // max transverse acceleration / speed^2 over interior samples
  int rejected_samples;  // samples skipped for vanishing velocity
};

// Measures how far a sampled curve is from being an unparameterized geodesic
// of the selected metric: the component of the discrete covariant acceleration
// transverse to the velocity, normalized by speed^2. Uses centered differences
// on the sample grid only, so externally produced curves are admissible.
ReparamResult reparam_residual(const ChartModel& model, Which w,
                               const std::vector<Vector>& positions, double dt);

struct TangentState {
  PhaseState state;
  Vector delta;  // linearized displacement, size 2n
};

enum class TangentMode { jacobian, two_orbit };

// Advances state and displacement by one step of the flow of `generator`.
// jacobian: delta is propagated by the exact differential of the
// implicit-midpoint map with a symmetrized finite-difference Hessian, which
// keeps the linear map symplectic. two_orbit: forward difference of two
// nearby orbits at fixed separation 1e-8.
TangentState tangent_step(const Observable& generator, const TangentState& ts, double h,
                          const IntegratorConfig& config,
                          TangentMode mode = TangentMode::jacobian);

// The linearized step map used in jacobian mode (exposed for audits).
Matrix tangent_step_matrix(const Observable& generator, const PhaseState& state, double h,
                           const IntegratorConfig& config);

}  // namespace geq

#endif
