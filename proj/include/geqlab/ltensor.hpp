#ifndef GEQLAB_LTENSOR_HPP
#define GEQLAB_LTENSOR_HPP

#include "geqlab/chart.hpp"
#include "geqlab/common.hpp"

#include <vector>

namespace geq {

inline constexpr double kTolMult = 1e-9;  // eigenvalue coincidence
inline constexpr double kTolSym = 1e-10;  // g-self-adjointness residual

struct LTensorValue {
  Matrix L;            // matrix of the (1,1)-tensor acting on column vectors
  Vector eigenvalues;  // sorted ascending, real
  Matrix eigenbasis;   // columns g-orthonormal, matching eigenvalue order
  double sym_residual; // max-abs of gL - (gL)^T at the point
};

// L = (det gbar / det g)^{1/(n+1)} * gbar^{-1} g, eigendecomposed through the
// g-Cholesky congruence so the symmetric solver applies and the spectrum is
// real by construction.
LTensorValue compute_L(const ChartModel& model, const Vector& x);

struct SpectrumSample {
  Vector point;
  Vector eigenvalues;
  std::vector<bool> coincident;  // adjacent pair gaps below kTolMult
  bool simple() const;
};

SpectrumSample spectrum(const ChartModel& model, const Vector& x);

// Adjugate (transposed cofactor matrix): cofactor expansion for n <= 4,
// Faddeev-LeVerrier recursion beyond. adj of a 1x1 matrix is [1].
Matrix adjugate(const Matrix& m);

// S_t = adj(L - t Id); finite for every t including eigenvalues of L, and a
// polynomial of degree n-1 in t.
Matrix adjugate_S(const ChartModel& model, const Vector& x, double t);

// Max-abs component of the Nijenhuis torsion of the L field, with coordinate
// derivatives of L taken by centered differences (step 1e-5 per axis length).
double nijenhuis_torsion(const ChartModel& model, const Vector& x);

struct NonPropResult {
  bool strict;   // all pencil roots simple beyond kTolMult
  Vector roots;  // roots of det(g - t gbar), sorted ascending
  Vector gaps;   // adjacent root gaps
};

NonPropResult strict_nonprop(const ChartModel& model, const Vector& x);

struct LeafRestriction {
  ChartModel model;          // metrics frozen off-leaf, dim = |axes|
  std::vector<int> axes;     // kept coordinate axes (0-based, sorted)
  Vector basepoint;          // full-dimensional basepoint
  double leaf_constant;      // C = prod of off-leaf eigenvalues at basepoint
  Vector expected_spectrum;  // C^{1/(m+1)} * (lambda_a(basepoint))_{a in axes}
};

// Restricts an LC-generated pair to the coordinate plaque through `basepoint`
// spanned by `axes`, and predicts the restricted pair's L-spectrum.
LeafRestriction leaf_restriction(const ChartModel& model, const std::vector<int>& axes,
                                 const Vector& basepoint);

}  // namespace geq

#endif
