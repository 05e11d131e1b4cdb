#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geqlab/chart.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace geq;
using namespace geqtest;

TEST_CASE("lc_generate reproduces the hand-evaluated diagonal pair on trig2") {
  const ChartModel model = trig2();
  const Vector x0 = vec2(0.0, 0.0);  // lambda = (1, 2.3)

  const Matrix G = model.metric(Which::g, x0);
  CHECK(G(0, 0) == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(G(1, 1) == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(G(0, 1) == 0.0);

  const Matrix Gbar = model.metric(Which::gbar, x0);
  CHECK(Gbar(0, 0) == doctest::Approx(1.3 / 2.3).epsilon(1e-14));
  CHECK(Gbar(1, 1) == doctest::Approx(1.3 / 5.29).epsilon(1e-14));
}

TEST_CASE("constant profiles give a flat constant pair") {
  const ChartModel model = flat2();
  Rng rng(7);
  for (int s = 0; s < 10; ++s) {
    const Vector x = random_point(model, rng);
    const Matrix G = model.metric(Which::g, x);
    const Matrix Gbar = model.metric(Which::gbar, x);
    CHECK(G(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(G(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(Gbar(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(Gbar(1, 1) == doctest::Approx(0.25).epsilon(1e-15));
    // all Christoffel symbols vanish for constant coefficients
    for (const Matrix& gk : christoffel(model, Which::g, x))
      CHECK(gk.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("overlapping profile ranges are rejected with the offending pair") {
  CHECK_THROWS_WITH_AS(
      lc_generate({ScalarProfile::sine(1.0, 0.3, 1.0), ScalarProfile::sine(1.75, 0.55, 1.0)},
                  {0.0, 0.0}, {kTwoPi, kTwoPi}, {true, true}),
      "overlapping ranges (1,2)", std::invalid_argument);
}

TEST_CASE("non-positive profiles are rejected") {
  CHECK_THROWS_AS(lc_generate({ScalarProfile::sine(0.2, 0.3, 1.0),
                               ScalarProfile::constant_value(2.0)},
                              {0.0, 0.0}, {kTwoPi, kTwoPi}, {true, true}),
                  std::invalid_argument);
}

TEST_CASE("declared-range audit catches a lying profile") {
  ScalarProfile lying = ScalarProfile::sine(1.0, 0.3, 1.0);
  lying.hi = 1.1;  // actual max is 1.3
  CHECK_THROWS_AS(lc_generate({lying, ScalarProfile::constant_value(2.0)}, {0.0, 0.0},
                              {kTwoPi, kTwoPi}, {true, true}),
                  std::invalid_argument);
}

TEST_CASE("periodic wrap and non-periodic domain errors") {
  const ChartModel model = trig2();
  const Matrix a = model.metric(Which::g, vec2(0.0, 0.0));
  const Matrix b = model.metric(Which::g, vec2(0.0, kTwoPi));
  CHECK((a - b).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));

  const ChartModel boxed =
      lc_generate({ScalarProfile::affine(1.0, 0.05, 0.0, 1.0), ScalarProfile::constant_value(2.0)},
                  {0.0, 0.0}, {1.0, 1.0}, {false, false});
  CHECK_THROWS_AS(boxed.metric(Which::g, vec2(1.5, 0.5)), std::domain_error);
}

TEST_CASE("metric derivative: analytic closed form vs centered differences") {
  const ChartModel model = trig2();
  const Vector x0 = vec2(0.0, 0.0);

  // d1 g_11 = -lambda_1'(0) = -0.3 from the closed form
  const auto [G, dG] = metric_eval(model, Which::g, x0);
  CHECK(G(0, 0) == doctest::Approx(1.3));
  CHECK(dG[0](0, 0) == doctest::Approx(-0.3).epsilon(1e-13));

  // finite differences of the evaluator agree to 10 h^2
  Rng rng(21);
  for (int s = 0; s < 50; ++s) {
    const Vector x = random_point(model, rng);
    const std::vector<Matrix> analytic = model.metric_derivative(Which::gbar, x);
    for (int k = 0; k < model.dim(); ++k) {
      const double h = kFdStep * model.axis_length(k);
      Vector xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const Matrix fd =
          (model.metric(Which::gbar, xp) - model.metric(Which::gbar, xm)) / (2.0 * h);
      CHECK((fd - analytic[k]).cwiseAbs().maxCoeff() < 10.0 * kFdStep * kFdStep);
    }
  }
}

TEST_CASE("gbar_ii / g_ii recovers rho_i exactly") {
  const ChartModel model = trig3();
  Rng rng(3);
  for (int s = 0; s < 200; ++s) {
    const Vector x = random_point(model, rng);
    const Matrix G = model.metric(Which::g, x);
    const Matrix Gbar = model.metric(Which::gbar, x);
    const Vector rho = lcform::rho(model.lc().lambdas(x));
    for (int i = 0; i < 3; ++i)
      CHECK(Gbar(i, i) / G(i, i) == doctest::Approx(rho[i]).epsilon(1e-14));
  }
}

TEST_CASE("christoffel matches the hand value and is symmetric") {
  const ChartModel model = trig2();
  const std::vector<Matrix> gamma = christoffel(model, Which::g, vec2(0.0, 0.0));
  CHECK(gamma[0](0, 0) == doctest::Approx(-0.3 / 2.6).epsilon(1e-12));

  Rng rng(11);
  for (int s = 0; s < 100; ++s) {
    const Vector x = random_point(model, rng);
    for (const Matrix& gk : christoffel(model, Which::g, x))
      CHECK((gk - gk.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("spd_check accepts trig2 and flags an indefinite field") {
  const ChartModel model = trig2();
  const SpdCheckResult ok = spd_check(model, Which::g, 10000, 42);
  CHECK(ok.positive_definite);
  CHECK(ok.min_eigenvalue >= 0.4 - 1e-9);  // min over chart of lambda_2 - lambda_1

  MetricEvaluator bad;
  bad.value = [](const Vector& x) {
    Matrix m = Matrix::Identity(2, 2);
    m(1, 1) = std::sin(x[0]);
    return m;
  };
  const ChartModel raw({0.0, 0.0}, {kTwoPi, kTwoPi}, {true, true}, bad, bad);
  CHECK_FALSE(spd_check(raw, Which::g, 1000, 1).positive_definite);

  CHECK_THROWS_AS(spd_check(model, Which::g, 0, 1), std::invalid_argument);
}

TEST_CASE("lc models stay positive definite across the whole chart") {
  for (const ChartModel& model : {trig2(), trig3(), const2()}) {
    CHECK(spd_check(model, Which::g, 10000, 5).positive_definite);
    CHECK(spd_check(model, Which::gbar, 10000, 6).positive_definite);
  }
}
