#ifndef GEQLAB_TESTS_HELPERS_HPP
#define GEQLAB_TESTS_HELPERS_HPP

#include "geqlab/chart.hpp"
#include "geqlab/integrals.hpp"

#include <cmath>
#include <random>

namespace geqtest {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// n=2 torus model: lambda_1 = 1 + 0.3 sin x1 in [0.7, 1.3],
//                  lambda_2 = 2 + 0.3 cos x2 in [1.7, 2.3]
inline geq::ChartModel trig2() {
  return geq::lc_generate({geq::ScalarProfile::sine(1.0, 0.3, 1.0),
                           geq::ScalarProfile::cosine(2.0, 0.3, 1.0)},
                          {0.0, 0.0}, {kTwoPi, kTwoPi}, {true, true});
}

// n=3 torus model: lambda_i = i + 0.2 sin x_i
inline geq::ChartModel trig3() {
  return geq::lc_generate({geq::ScalarProfile::sine(1.0, 0.2, 1.0),
                           geq::ScalarProfile::sine(2.0, 0.2, 1.0),
                           geq::ScalarProfile::sine(3.0, 0.2, 1.0)},
                          {0.0, 0.0, 0.0}, {kTwoPi, kTwoPi, kTwoPi}, {true, true, true});
}

// n=2 with one constant eigenvalue: lambda_1 = 1, lambda_2 = 2 + 0.3 cos x2
inline geq::ChartModel const2() {
  return geq::lc_generate({geq::ScalarProfile::constant_value(1.0),
                           geq::ScalarProfile::cosine(2.0, 0.3, 1.0)},
                          {0.0, 0.0}, {kTwoPi, kTwoPi}, {true, true});
}

// flat constant pair: lambda = (1, 2) everywhere
inline geq::ChartModel flat2() {
  return geq::lc_generate({geq::ScalarProfile::constant_value(1.0),
                           geq::ScalarProfile::constant_value(2.0)},
                          {0.0, 0.0}, {kTwoPi, kTwoPi}, {true, true});
}

inline geq::Vector vec2(double a, double b) {
  geq::Vector v(2);
  v << a, b;
  return v;
}

inline geq::Vector vec3(double a, double b, double c) {
  geq::Vector v(3);
  v << a, b, c;
  return v;
}

inline geq::Vector random_point(const geq::ChartModel& model, geq::Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  geq::Vector x(model.dim());
  for (int i = 0; i < model.dim(); ++i)
    x[i] = model.lower()[i] + model.axis_length(i) * unit(rng);
  return x;
}

inline geq::PhaseState random_state(const geq::ChartModel& model, geq::Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const geq::Vector x = random_point(model, rng);
  geq::Vector xi(model.dim());
  for (int i = 0; i < model.dim(); ++i) xi[i] = gauss(rng);
  const geq::Matrix G = model.metric(geq::Which::g, x);
  xi /= std::sqrt(xi.dot(G * xi));
  return geq::PhaseState{x, G * xi};
}

}  // namespace geqtest

#endif
