#include <doctest.h>

#include <cmath>
#include <random>

#include "tiltmin/maps.hpp"

using namespace tiltmin;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

const NormSpec kL2_1 = NormSpec::lp(Exponent::finite(2), 1);

}  // namespace

TEST_CASE("evaluate examples") {
  const auto line = FeasibleSet::full_space(1);
  const auto quarter = MapSpec::affine(Matrix::Identity(1, 1) * 0.25, Vector::Zero(1));
  CHECK(evaluate(quarter, vec({8}), line) == vec({2}));

  const auto plane = FeasibleSet::full_space(2);
  const auto c = MapSpec::constant(vec({1, 1}));
  CHECK(evaluate(c, vec({-3, 7}), plane) == vec({1, 1}));

  const auto affine = MapSpec::affine(diag2(0.3, 0.2), vec({1, 1}));
  CHECK(evaluate(affine, vec({0, 0}), plane) == vec({1, 1}));
}

TEST_CASE("evaluate range and domain errors") {
  const auto orthant = FeasibleSet::orthant(vec({0, 0}));
  const auto flip = MapSpec::affine(-Matrix::Identity(2, 2) * 0.25, Vector::Zero(2));
  CHECK_THROWS_AS(evaluate(flip, vec({1, 1}), orthant), RangeViolationError);
  CHECK_THROWS_AS(evaluate(flip, vec({-1, 1}), orthant), InputError);
  // projection composition repairs the range
  const auto fixed = MapSpec::composed_with_projection(flip);
  CHECK(contains(orthant, evaluate(fixed, vec({1, 1}), orthant), 1e-12));
}

TEST_CASE("composed maps always land in the set") {
  const auto set = FeasibleSet::cone_intersection({{vec({1, 2}), 1}, {vec({2, 1}), 1}});
  Matrix a(2, 2);
  a << 0.1, -0.7, 0.4, -0.2;
  const auto f = MapSpec::composed_with_projection(MapSpec::affine_plus_bounded(a, vec({-3, 1}), Perturbation::kSine, 2.0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int k = 0; k < 500; ++k) {
    const Vector x = project(set, vec({u(rng), u(rng)}));
    CHECK(contains(set, evaluate(f, x, set), 1e-12));
  }
}

TEST_CASE("operator norms in closed form") {
  Matrix a(2, 2);
  a << 0.1, -0.2, 0.3, 0.05;
  CHECK(*operator_norm(a, NormSpec::lp(Exponent::finite(1), 2)) == doctest::Approx(0.4));
  CHECK(*operator_norm(a, NormSpec::lp(Exponent::infinity(), 2)) == doctest::Approx(0.35));
  // reference value from the 2x2 singular value formula
  const double t = a.squaredNorm();
  const double det = a.determinant();
  const double sigma = std::sqrt(0.5 * (t + std::sqrt(t * t - 4 * det * det)));
  CHECK(*operator_norm(a, NormSpec::lp(Exponent::finite(2), 2)) == doctest::Approx(sigma).epsilon(1e-10));
  CHECK_FALSE(operator_norm(a, NormSpec::lp(Exponent::finite(3), 2)).has_value());
}

TEST_CASE("spectral norm handles rotations and rank deficiency") {
  Matrix r(2, 2);
  r << 0, -1, 1, 0;
  CHECK(spectral_norm(0.3 * r) == doctest::Approx(0.3).epsilon(1e-12));
  Matrix low = Matrix::Zero(3, 3);
  low(2, 0) = 0.4;
  CHECK(spectral_norm(low) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(spectral_norm(Matrix::Zero(2, 2)) == 0.0);
}

TEST_CASE("growth coefficient examples") {
  const auto line = FeasibleSet::full_space(1);
  const auto quarter = MapSpec::affine(Matrix::Identity(1, 1) * 0.25, Vector::Zero(1));
  auto g = growth_coefficient(quarter, kL2_1, line, {1e2}, 8, 1);
  CHECK(g.method == GrowthMethod::kAnalytic);
  CHECK(g.kappa_hat == doctest::Approx(0.25));
  CHECK(g.satisfied);

  const auto plane = FeasibleSet::full_space(2);
  for (const auto& spec : {NormSpec::lp(Exponent::finite(1), 2), NormSpec::lp(Exponent::infinity(), 2)}) {
    auto gc = growth_coefficient(MapSpec::constant(vec({1, 1})), spec, plane, {1e2}, 8, 1);
    CHECK(gc.kappa_hat == 0.0);
    CHECK(gc.satisfied);
  }

  const auto l2 = NormSpec::lp(Exponent::finite(2), 2);
  const auto bumped = MapSpec::affine_plus_bounded(Matrix::Identity(2, 2) * 0.4, Vector::Zero(2), Perturbation::kSine, 1.0);
  auto gs = growth_coefficient(bumped, l2, plane, {1e2, 1e3, 1e4}, 64, 5);
  CHECK(gs.method == GrowthMethod::kSampled);
  CHECK(std::abs(gs.kappa_hat - 0.4) <= 1e-2);
  CHECK(gs.satisfied);
  // independent check at radius 1e4: the field is bounded by sqrt(2) in l2
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 100; ++k) {
    Vector u = vec({gauss(rng), gauss(rng)});
    u *= 1e4 / u.norm();
    const double ratio = evaluate(bumped, u, plane).norm() / 1e4;
    CHECK(std::abs(ratio - 0.4) <= std::sqrt(2.0) / 1e4 + 1e-12);
  }
}

TEST_CASE("growth coefficient input errors") {
  const auto plane = FeasibleSet::full_space(2);
  const auto l2 = NormSpec::lp(Exponent::finite(2), 2);
  const auto c = MapSpec::constant(vec({1, 1}));
  CHECK_THROWS_AS(growth_coefficient(c, l2, plane, {}, 8, 1), InputError);
  CHECK_THROWS_AS(growth_coefficient(c, l2, plane, {10, 5}, 8, 1), InputError);
  const auto bumped = MapSpec::affine_plus_bounded(Matrix::Identity(2, 2) * 0.4, Vector::Zero(2), Perturbation::kTanh, 1.0);
  CHECK_THROWS_AS(growth_coefficient(bumped, l2, plane, {1, 10}, 8, 1), InputError);
}

TEST_CASE("sampled ratio never exceeds the analytic bound") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  std::normal_distribution<double> gauss;
  const auto l2 = NormSpec::lp(Exponent::finite(2), 3);
  const auto space = FeasibleSet::full_space(3);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a(3, 3);
    for (int i = 0; i < 9; ++i) a.data()[i] = u(rng);
    const Vector b = 5.0 * Vector::NullaryExpr(3, [&](Eigen::Index) { return u(rng); });
    const auto f = MapSpec::affine(a, b);
    const double kappa = growth_coefficient(f, l2, space, {1e2}, 1, 0).kappa_hat;
    for (int k = 0; k < 200; ++k) {
      Vector x(3);
      for (int i = 0; i < 3; ++i) x[i] = gauss(rng);
      x *= 1e4 / x.norm();
      CHECK(evaluate(f, x, space).norm() / 1e4 <= kappa + 1e-6 + b.norm() / 1e4);
    }
  }
}

TEST_CASE("conditional bound splits the slack") {
  GrowthEstimate est;
  est.kappa_hat = 0.3;
  est.offset = 2.0;
  est.satisfied = true;
  const auto bound = conditional_bound(est);
  CHECK(bound.kappa == doctest::Approx(0.4));
  CHECK(bound.r0 == doctest::Approx(20.0));
  est.satisfied = false;
  CHECK_THROWS_AS(conditional_bound(est), PreconditionError);
}

TEST_CASE("analytic fixed point examples") {
  const auto quarter = MapSpec::affine(Matrix::Identity(1, 1) * 0.25, Vector::Zero(1));
  CHECK(*analytic_fixed_point(quarter).point == vec({0}));

  // oracle: the diagonal system decouples into x_i = b_i / (1 - a_ii)
  const auto fp = analytic_fixed_point(MapSpec::affine(diag2(0.3, 0.2), vec({1, 1})));
  REQUIRE(fp.point);
  CHECK((*fp.point)[0] == doctest::Approx(1.0 / 0.7).epsilon(1e-14));
  CHECK((*fp.point)[1] == doctest::Approx(1.25).epsilon(1e-14));

  CHECK(*analytic_fixed_point(MapSpec::constant(vec({1, 1}))).point == vec({1, 1}));

  const auto singular = analytic_fixed_point(MapSpec::affine(Matrix::Identity(2, 2), vec({1, 0})));
  CHECK_FALSE(singular.point);
  CHECK(singular.note == "I - A is singular");

  CHECK_FALSE(analytic_fixed_point(MapSpec::composed_with_projection(quarter)).point);
}

TEST_CASE("analytic fixed points are fixed") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 1; n <= 4; ++n) {
    const auto space = FeasibleSet::full_space(n);
    for (int trial = 0; trial < 50; ++trial) {
      Matrix a(n, n);
      for (int i = 0; i < n * n; ++i) a.data()[i] = 0.4 * u(rng);
      Vector b(n);
      for (int i = 0; i < n; ++i) b[i] = 3 * u(rng);
      const auto f = MapSpec::affine(a, b);
      const auto fp = analytic_fixed_point(f);
      REQUIRE(fp.point);
      CHECK((*fp.point - evaluate(f, *fp.point, space)).norm() <= 1e-10);
    }
  }
}
