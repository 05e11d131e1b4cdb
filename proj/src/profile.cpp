#include "geqlab/profile.hpp"

#include <algorithm>
#include <cmath>

namespace geq {

ScalarProfile ScalarProfile::sine(double offset, double amplitude, double frequency) {
  ScalarProfile p;
  p.value = [=](double x) { return offset + amplitude * std::sin(frequency * x); };
  p.slope = [=](double x) { return amplitude * frequency * std::cos(frequency * x); };
  p.lo = offset - std::abs(amplitude);
  p.hi = offset + std::abs(amplitude);
  p.name = "sin";
  return p;
}

ScalarProfile ScalarProfile::cosine(double offset, double amplitude, double frequency) {
  ScalarProfile p;
  p.value = [=](double x) { return offset + amplitude * std::cos(frequency * x); };
  p.slope = [=](double x) { return -amplitude * frequency * std::sin(frequency * x); };
  p.lo = offset - std::abs(amplitude);
  p.hi = offset + std::abs(amplitude);
  p.name = "cos";
  return p;
}

ScalarProfile ScalarProfile::affine(double offset, double slope, double x_lo, double x_hi) {
  ScalarProfile p;
  p.value = [=](double x) { return offset + slope * x; };
  p.slope = [=](double) { return slope; };
  const double a = offset + slope * x_lo;
  const double b = offset + slope * x_hi;
  p.lo = std::min(a, b);
  p.hi = std::max(a, b);
  p.constant = (slope == 0.0);
  p.name = "affine";
  return p;
}

ScalarProfile ScalarProfile::constant_value(double c) {
  ScalarProfile p;
  p.value = [=](double) { return c; };
  p.slope = [](double) { return 0.0; };
  p.lo = c;
  p.hi = c;
  p.constant = true;
  p.name = "constant";
  return p;
}

}  // namespace geq
