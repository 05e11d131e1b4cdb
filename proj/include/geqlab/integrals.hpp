#ifndef GEQLAB_INTEGRALS_HPP
#define GEQLAB_INTEGRALS_HPP

#include "geqlab/chart.hpp"
#include "geqlab/common.hpp"

#include <string>

namespace geq {

inline constexpr double kGradFdStep = 1e-6;   // phase-space finite differences
inline constexpr double kRankThreshold = 1e-8;  // relative singular value cutoff

// A cotangent point (x, p) on the chart; the unit of all dynamics.
struct PhaseState {
  Vector x;
  Vector p;
};

// xi = g^{-1} p
Vector velocity(const ChartModel& model, const PhaseState& state);
PhaseState state_from_velocity(const ChartModel& model, const Vector& x, const Vector& xi);

// I_t(x, xi) = g(S_t xi, xi) with S_t the adjugate of (L - t Id).
double eval_I(const ChartModel& model, const PhaseState& state, double t);

// Closed diagonal form sum_i |Pi_i(lambda_i)| Pi_i(t) xi_i^2; LC models only.
// Independent of the adjugate route and used to cross-check it.
double eval_I_lc(const ChartModel& model, const PhaseState& state, double t);

// d/dt I_t, taken exactly on the degree-(n-1) polynomial coefficients.
double eval_I_prime(const ChartModel& model, const PhaseState& state, double t);

// I_t = sum_k coefficients[k] t^k at a fixed state; degree <= n-1.
struct IntegralFamily {
  Vector coefficients;
  double refit_residual;  // max defect of the coefficients at the sample nodes
};

IntegralFamily poly_coefficients(const ChartModel& model, const PhaseState& state);

// [min declared range - 1, max declared range + 1]; conditioning interval for
// the Vandermonde fit and the default home of reference t values.
std::pair<double, double> reference_interval(const ChartModel& model);
// k Chebyshev nodes in the reference interval, sorted ascending.
Vector chebyshev_nodes(const ChartModel& model, int k);

// Gradient (dI/dx, dI/dp) in canonical cotangent coordinates: analytic for LC
// models, Richardson-extrapolated centered differences otherwise.
Vector grad_I(const ChartModel& model, const PhaseState& state, double t);
// Finite-difference route regardless of model kind (cross-check).
Vector grad_I_fd(const ChartModel& model, const PhaseState& state, double t);

// Closed record: value and gradient of a phase-space observable. The model
// must outlive the observable.
struct Observable {
  std::string name;
  std::function<double(const PhaseState&)> value;
  std::function<Vector(const PhaseState&)> gradient;  // (d/dx, d/dp), 2n
};

Observable hamiltonian_observable(const ChartModel& model, Which w = Which::g);
Observable integral_observable(const ChartModel& model, double t);
// F = sum_j a_j I_{t_j}
Observable combined_observable(const ChartModel& model, const Vector& a,
                               const Vector& t_list);

// Canonical bracket sum_k (df/dx_k dg/dp_k - df/dp_k dg/dx_k).
double poisson_bracket(const Observable& f, const Observable& g, const PhaseState& state);

// Numerical rank of the n x 2n matrix of integral gradients at the state.
int independence_rank(const ChartModel& model, const PhaseState& state,
                      const Vector& t_list);

}  // namespace geq

#endif
