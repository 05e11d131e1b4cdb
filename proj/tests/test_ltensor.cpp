#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geqlab/ltensor.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace geq;
using namespace geqtest;

namespace {

// Independent oracle: adjugate entry (j,i) = (-1)^{i+j} det(minor_ij), with the
// minor determinant computed by explicit Laplace recursion.
double laplace_det(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (int j = 0; j < n; ++j) {
    Matrix sub(n - 1, n - 1);
    for (int r = 1; r < n; ++r)
      for (int c = 0, sc = 0; c < n; ++c) {
        if (c == j) continue;
        sub(r - 1, sc++) = m(r, c);
      }
    det += ((j % 2 == 0) ? 1.0 : -1.0) * m(0, j) * laplace_det(sub);
  }
  return det;
}

Matrix oracle_adjugate(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  Matrix adj(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Matrix sub(n - 1, n - 1);
      for (int r = 0, sr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, sc = 0; c < n; ++c) {
          if (c == j) continue;
          sub(sr, sc++) = m(r, c);
        }
        ++sr;
      }
      adj(j, i) = (((i + j) % 2 == 0) ? 1.0 : -1.0) * laplace_det(sub);
    }
  return adj;
}

}  // namespace

TEST_CASE("compute_L recovers the generating profiles on trig2") {
  const ChartModel model = trig2();
  const LTensorValue lt = compute_L(model, vec2(0.0, 0.0));
  CHECK(lt.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(lt.eigenvalues[1] == doctest::Approx(2.3).epsilon(1e-13));
  CHECK(lt.sym_residual < kTolSym);

  // eigenbasis is g-orthonormal
  const Matrix G = model.metric(Which::g, vec2(0.0, 0.0));
  const Matrix gram = lt.eigenbasis.transpose() * G * lt.eigenbasis;
  CHECK((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("proportional pair gives a scalar L with full multiplicity") {
  const ChartModel model = proportional_pair(trig2(), 2.0);
  const LTensorValue lt = compute_L(model, vec2(1.0, 2.0));
  const double expected = std::pow(2.0, 1.0 / 3.0);  // c^{-1/(n+1)} with c = 1/2
  CHECK(lt.eigenvalues[0] == doctest::Approx(expected).epsilon(1e-13));
  CHECK(lt.eigenvalues[1] == doctest::Approx(expected).epsilon(1e-13));
  CHECK_FALSE(spectrum(model, vec2(1.0, 2.0)).simple());
}

TEST_CASE("spectrum equals profile values across models and points") {
  Rng rng(17);
  for (const ChartModel& model : {trig2(), trig3(), const2()}) {
    for (int s = 0; s < 300; ++s) {
      const Vector x = random_point(model, rng);
      const SpectrumSample sp = spectrum(model, x);
      const Vector lam = model.lc().lambdas(model.wrap(x));
      CHECK((sp.eigenvalues - lam).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(sp.simple());
    }
  }
  // trig3 at (pi/2, pi/2, pi/2) -> (1.2, 2.2, 3.2)
  const ChartModel t3 = trig3();
  const Vector ev = spectrum(t3, vec3(M_PI_2, M_PI_2, M_PI_2)).eigenvalues;
  CHECK(ev[0] == doctest::Approx(1.2).epsilon(1e-13));
  CHECK(ev[1] == doctest::Approx(2.2).epsilon(1e-13));
  CHECK(ev[2] == doctest::Approx(3.2).epsilon(1e-13));
}

TEST_CASE("self-adjointness residual stays at round-off at random points") {
  Rng rng(23);
  const ChartModel model = trig3();
  for (int s = 0; s < 100; ++s)
    CHECK(compute_L(model, random_point(model, rng)).sym_residual < 1e-12);
}

TEST_CASE("adjugate matches the cofactor oracle for n = 1..6") {
  Rng rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      Matrix m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
      const Matrix got = adjugate(m);
      const Matrix want = oracle_adjugate(m);
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, want.cwiseAbs().maxCoeff()));
    }
  }
  CHECK(adjugate(Matrix::Constant(1, 1, 7.0))(0, 0) == 1.0);
}

TEST_CASE("adjugate_S at the hand-evaluated points, including the spectrum") {
  const ChartModel model = trig2();
  const Vector x0 = vec2(0.0, 0.0);

  const Matrix s0 = adjugate_S(model, x0, 0.0);
  CHECK(s0(0, 0) == doctest::Approx(2.3).epsilon(1e-13));
  CHECK(s0(1, 1) == doctest::Approx(1.0).epsilon(1e-13));

  const Matrix s1 = adjugate_S(model, x0, 1.0);  // t = lambda_1: finite, rank drops
  CHECK(s1(0, 0) == doctest::Approx(1.3).epsilon(1e-13));
  CHECK(s1(1, 1) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("adjugate identity (L - t Id) S_t = det(L - t Id) Id, t at eigenvalues too") {
  Rng rng(31);
  std::uniform_real_distribution<double> tdist(-1.0, 5.0);
  for (const ChartModel& model : {trig2(), trig3()}) {
    const int n = model.dim();
    for (int s = 0; s < 100; ++s) {
      const Vector x = random_point(model, rng);
      const LTensorValue lt = compute_L(model, x);
      std::vector<double> ts;
      for (int i = 0; i < n; ++i) ts.push_back(lt.eigenvalues[i]);
      for (int i = 0; i < 20; ++i) ts.push_back(tdist(rng));
      for (double t : ts) {
        const Matrix m = lt.L - t * Matrix::Identity(n, n);
        const double det = (lt.eigenvalues.array() - t).prod();
        const Matrix defect = m * adjugate(m) - det * Matrix::Identity(n, n);
        CHECK(defect.cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
}

TEST_CASE("S_t entries interpolate to a polynomial of degree <= n-1") {
  const ChartModel model = trig3();
  Rng rng(37);
  const Vector x = random_point(model, rng);
  const int n = model.dim();

  // sample at n nodes, build the Lagrange interpolant, probe fresh t values
  Vector nodes(n);
  for (int k = 0; k < n; ++k) nodes[k] = -0.5 + k * 1.7;
  std::vector<Matrix> samples;
  for (int k = 0; k < n; ++k) samples.push_back(adjugate_S(model, x, nodes[k]));

  std::uniform_real_distribution<double> tdist(-1.0, 4.0);
  for (int probe = 0; probe < 25; ++probe) {
    const double t = tdist(rng);
    Matrix interp = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      double weight = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != k) weight *= (t - nodes[j]) / (nodes[k] - nodes[j]);
      interp += weight * samples[k];
    }
    CHECK((interp - adjugate_S(model, x, t)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("nijenhuis torsion vanishes for canonical pairs and flags a broken one") {
  Rng rng(41);
  for (const ChartModel& model : {trig2(), trig3()}) {
    for (int s = 0; s < 100; ++s)
      CHECK(nijenhuis_torsion(model, random_point(model, rng)) < 1e-7);
  }
  const ChartModel flat = flat2();
  CHECK(nijenhuis_torsion(flat, vec2(1.0, 1.0)) < 1e-14);

  const ChartModel broken = break_rho(trig2(), 0);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s)
    worst = std::max(worst, nijenhuis_torsion(broken, random_point(broken, rng)));
  CHECK(worst > 1e-3);
}

TEST_CASE("strict non-proportionality from the pencil roots") {
  const ChartModel model = trig2();
  const NonPropResult res = strict_nonprop(model, vec2(0.0, 0.0));
  CHECK(res.strict);
  CHECK(res.roots[0] == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(res.roots[1] == doctest::Approx(5.29).epsilon(1e-12));

  const ChartModel prop = proportional_pair(trig2(), 2.0);
  const NonPropResult degenerate = strict_nonprop(prop, vec2(0.3, 0.4));
  CHECK_FALSE(degenerate.strict);
  CHECK(degenerate.roots[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(degenerate.roots[1] == doctest::Approx(0.5).epsilon(1e-12));

  // agreement with the multiplicity flags of the spectrum
  Rng rng(43);
  const ChartModel t3 = trig3();
  for (int s = 0; s < 100; ++s) {
    const Vector x = random_point(t3, rng);
    CHECK(strict_nonprop(t3, x).strict == spectrum(t3, x).simple());
  }
}

TEST_CASE("leaf restriction: predicted spectrum matches compute_L on the leaf") {
  const ChartModel model = trig3();
  Rng rng(47);

  SUBCASE("A = {1,2} on trig3") {
    const Vector base = vec3(0.7, 1.9, M_PI_2);  // lambda_3 = 3.2
    const LeafRestriction leaf = leaf_restriction(model, {0, 1}, base);
    CHECK(leaf.leaf_constant == doctest::Approx(3.2).epsilon(1e-13));
    const double scale = std::cbrt(3.2);

    const Vector ev0 = compute_L(leaf.model, vec2(base[0], base[1])).eigenvalues;
    CHECK((ev0 - leaf.expected_spectrum).cwiseAbs().maxCoeff() < 1e-8);

    // prediction holds across the plaque, not only at the basepoint
    for (int s = 0; s < 30; ++s) {
      const Vector y = random_point(leaf.model, rng);
      const Vector ev = compute_L(leaf.model, y).eigenvalues;
      Vector predicted(2);
      for (int j = 0; j < 2; ++j)
        predicted[j] = scale * model.lc().profiles[j].value(y[j]);
      CHECK((ev - predicted).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  SUBCASE("one-dimensional leaf A = {1} on trig2") {
    const ChartModel t2 = trig2();
    const Vector base = vec2(0.4, 1.1);
    const LeafRestriction leaf = leaf_restriction(t2, {0}, base);
    const double c = t2.lc().profiles[1].value(base[1]);
    const double expected = std::sqrt(c) * t2.lc().profiles[0].value(base[0]);
    CHECK(leaf.expected_spectrum[0] == doctest::Approx(expected).epsilon(1e-12));
    const Vector ev = compute_L(leaf.model, leaf.basepoint.head(1)).eigenvalues;
    CHECK(ev[0] == doctest::Approx(expected).epsilon(1e-8));
  }

  SUBCASE("rejections") {
    CHECK_THROWS_AS(leaf_restriction(model, {0, 1, 2}, vec3(0, 0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(leaf_restriction(model, {}, vec3(0, 0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(leaf_restriction(model, {5}, vec3(0, 0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(leaf_restriction(proportional_pair(model, 2.0), {0}, vec3(0, 0, 0)),
                    std::invalid_argument);
  }
}
