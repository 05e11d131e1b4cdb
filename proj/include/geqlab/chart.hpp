#ifndef GEQLAB_CHART_HPP
#define GEQLAB_CHART_HPP

#include "geqlab/common.hpp"
#include "geqlab/profile.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace geq {

enum class Which { g, gbar };

// Centered finite-difference step for metric coefficients, relative to the
// axis length (see ChartModel::metric_derivative).
inline constexpr double kFdStep = 1e-5;

// Metric coefficients g_ij(x) and their coordinate derivatives d_k g_ij(x).
// `derivative` may be left empty; callers then fall back to centered finite
// differences of `value`.
struct MetricEvaluator {
  std::function<Matrix(const Vector&)> value;
  std::function<std::vector<Matrix>(const Vector&)> derivative;  // [k](i,j) = d_k g_ij
};

// Per-axis eigenvalue profiles of a canonically generated pair, kept with the
// model so downstream computations can use closed forms.
struct LCData {
  std::vector<ScalarProfile> profiles;

  Vector lambdas(const Vector& x) const;
  Vector dlambdas(const Vector& x) const;
};

// Closed-form pieces of the canonical diagonal pair. lam/dlam are per-axis
// eigenvalue values and derivatives at a point; indices are 0-based, so the
// sign of prod_{j != i}(lambda_j - lambda_i) is (-1)^i for ordered ranges.
namespace lcform {

double sign(int i);
// g_ii = |Pi_i(lambda_i)| = sign(i) * prod_{j != i}(lambda_j - lambda_i)
Vector diag_g(const Vector& lam);
// (k, i) entry = d_k g_ii
Matrix diag_g_derivative(const Vector& lam, const Vector& dlam);
// rho_i = 1 / (lambda_1 ... lambda_n * lambda_i); requires lam > 0
Vector rho(const Vector& lam);
// (k, i) entry = d_k rho_i
Matrix rho_derivative(const Vector& lam, const Vector& dlam);
// w_i(t) = prod_{j != i}(lambda_j - t)
double pi_at(const Vector& lam, int i, double t);
// d/dt of w_i(t)
double pi_prime_at(const Vector& lam, int i, double t);
// prod_{j != i, j != skip}(lambda_j - t)
double pi_at_excluding(const Vector& lam, int i, int skip, double t);

}  // namespace lcform

// An n-dimensional coordinate box, optionally periodic per axis, carrying a
// pair of metric evaluators. Immutable after construction; evaluation is
// pure and safe to run concurrently.
class ChartModel {
 public:
  ChartModel(std::vector<double> lo, std::vector<double> hi, std::vector<bool> periodic,
             MetricEvaluator g, MetricEvaluator gbar,
             std::shared_ptr<const LCData> lc = nullptr);

  int dim() const { return dim_; }
  const std::vector<double>& lower() const { return lo_; }
  const std::vector<double>& upper() const { return hi_; }
  const std::vector<bool>& periodic() const { return periodic_; }
  double axis_length(int i) const { return hi_[i] - lo_[i]; }

  // Wraps periodic coordinates into [lo, hi); throws std::domain_error for a
  // coordinate outside a non-periodic axis.
  Vector wrap(const Vector& x) const;

  const MetricEvaluator& evaluator(Which w) const { return w == Which::g ? g_ : gbar_; }
  Matrix metric(Which w, const Vector& x) const;
  std::vector<Matrix> metric_derivative(Which w, const Vector& x) const;

  bool is_lc() const { return lc_ != nullptr; }
  const LCData& lc() const;

  // Declared eigenvalue range across all profiles (LC models only).
  double range_min() const;
  double range_max() const;

 private:
  int dim_;
  std::vector<double> lo_, hi_;
  std::vector<bool> periodic_;
  MetricEvaluator g_, gbar_;
  std::shared_ptr<const LCData> lc_;
};

// Builds the canonical diagonal pair g_ii = |Pi_i(lambda_i)|,
// gbar_ii = rho_i g_ii from per-axis profiles. Rejects overlapping or
// non-positive profile ranges and audits the declared ranges by sampling.
ChartModel lc_generate(std::vector<ScalarProfile> profiles, std::vector<double> lo,
                       std::vector<double> hi, std::vector<bool> periodic);

// Metric coefficients and derivatives at a point (wrapped first).
std::pair<Matrix, std::vector<Matrix>> metric_eval(const ChartModel& model, Which w,
                                                   const Vector& x);

// Gamma^k_ij = 1/2 g^{kl} (d_i g_lj + d_j g_li - d_l g_ij); result[k](i,j).
std::vector<Matrix> christoffel(const ChartModel& model, Which w, const Vector& x);

struct SpdCheckResult {
  bool positive_definite;
  double min_eigenvalue;
  Vector worst_point;
};

// Samples the chart uniformly and reports the smallest metric eigenvalue seen.
SpdCheckResult spd_check(const ChartModel& model, Which w, int samples, std::uint64_t seed);

// Deliberately inconsistent variants used as discrimination controls.
// Replaces rho_{index} by 1 in gbar; the result is a raw (non-canonical) pair.
ChartModel break_rho(const ChartModel& lc_model, int index);
// gbar = c * g; degenerate (proportional) pair sharing the geodesics of g.
ChartModel proportional_pair(const ChartModel& model, double c);

}  // namespace geq

#endif
