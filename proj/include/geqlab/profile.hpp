#ifndef GEQLAB_PROFILE_HPP
#define GEQLAB_PROFILE_HPP

#include <functional>
#include <string>

namespace geq {

// One eigenvalue profile: a smooth scalar map of a single chart coordinate,
// its first derivative, and the declared range it stays in. Ranges of
// consecutive profiles must be strictly separated; see lc_generate.
struct ScalarProfile {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  double lo = 0.0;        // declared range [lo, hi]
  double hi = 0.0;
  bool constant = false;  // structural flag, not a numerical near-constant test
  std::string name;

  static ScalarProfile sine(double offset, double amplitude, double frequency);
  static ScalarProfile cosine(double offset, double amplitude, double frequency);
  // offset + slope * x on [x_lo, x_hi]; range from the endpoints
  static ScalarProfile affine(double offset, double slope, double x_lo, double x_hi);
  static ScalarProfile constant_value(double c);
};

}  // namespace geq

#endif
