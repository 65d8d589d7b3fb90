#include <doctest.h>

#include <cmath>
#include <random>

#include "tiltmin/functional.hpp"
#include "tiltmin/optimize.hpp"

using namespace tiltmin;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

const NormSpec kLine = NormSpec::lp(Exponent::finite(2), 1);

double double_well(const Vector& x) {
  const double t = x[0] * x[0] - 1.0;
  return t * t;
}

TiltedFunctional quarter_line() {
  return {kLine, FeasibleSet::full_space(1), MapSpec::affine(Matrix::Identity(1, 1) * 0.25, Vector::Zero(1))};
}

TiltedFunctional diagonal_affine(const NormSpec& spec) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 0.3;
  a(1, 1) = 0.2;
  return {spec, FeasibleSet::full_space(2), MapSpec::affine(a, vec({1, 1}))};
}

bool identical(const MinimizationResult& a, const MinimizationResult& b) {
  if (a.clusters.size() != b.clusters.size() || a.status != b.status || a.evaluations != b.evaluations ||
      a.global_value != b.global_value) {
    return false;
  }
  for (std::size_t i = 0; i < a.clusters.size(); ++i) {
    if (!(a.clusters[i].point == b.clusters[i].point) || a.clusters[i].value != b.clusters[i].value) return false;
  }
  return true;
}

void check_result_invariants(const MinimizationResult& r, const FeasibleSet& set, const NormSpec& spec,
                             double radius, double eps_val, double delta_sep) {
  REQUIRE_FALSE(r.clusters.empty());
  CHECK(r.global_value == r.clusters.front().value);
  for (std::size_t i = 0; i < r.clusters.size(); ++i) {
    const auto& c = r.clusters[i];
    CHECK(contains(set, c.point, 1e-9));
    CHECK(norm(c.point, spec) <= radius + 1e-9);
    CHECK(c.value <= r.global_value + eps_val);
    if (i > 0) CHECK(c.value >= r.clusters[i - 1].value);
    for (std::size_t j = 0; j < i; ++j) CHECK(norm(c.point - r.clusters[j].point, spec) >= delta_sep);
  }
}

}  // namespace

TEST_CASE("global_minimize finds both wells") {
  const auto set = FeasibleSet::full_space(1);
  OptimizeConfig cfg;
  const auto r = global_minimize(double_well, set, kLine, 2.0, cfg);
  REQUIRE(r.clusters.size() == 2);
  CHECK(r.status == MinimizationStatus::kOk);
  CHECK(std::abs(std::abs(r.clusters[0].point[0]) - 1.0) <= 1e-6);
  CHECK(std::abs(std::abs(r.clusters[1].point[0]) - 1.0) <= 1e-6);
  CHECK(r.clusters[0].point[0] * r.clusters[1].point[0] < 0.0);
  CHECK(r.global_value <= 1e-12);
  check_result_invariants(r, set, kLine, 2.0, cfg.eps_val, cfg.delta_sep);
}

TEST_CASE("global_minimize on the tilted functional of x/4") {
  // J(x, 4) = 0.75|x| - |4 - x/4| >= 0.5|x| - 4 with equality only at 0
  const auto f = quarter_line();
  const Vector y = vec({4});
  const auto r = global_minimize([&](const Vector& x) { return tilted_value(f, x, y); }, f.set(), kLine, 2.0, {});
  REQUIRE(r.clusters.size() == 1);
  CHECK(std::abs(r.clusters[0].point[0]) <= 1e-8);
  CHECK(r.global_value == doctest::Approx(-4.0).epsilon(1e-9));
}

TEST_CASE("global_minimize on the displacement of a diagonal affine map") {
  const auto l2 = NormSpec::lp(Exponent::finite(2), 2);
  const auto f = diagonal_affine(l2);
  const auto fp = *analytic_fixed_point(f.map()).point;
  const auto r = global_minimize([&](const Vector& x) { return displacement(f, x); }, f.set(), l2, 10.0, {});
  REQUIRE(r.clusters.size() == 1);
  CHECK((r.clusters[0].point - fp).norm() <= 1e-6);
  CHECK(r.global_value <= 1e-7);
}

TEST_CASE("displacement minimization is accurate under l1 and linf") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& p : {Exponent::finite(1), Exponent::infinity()}) {
    const auto spec = NormSpec::lp(p, 2);
    for (int trial = 0; trial < 10; ++trial) {
      Matrix a(2, 2);
      for (int i = 0; i < 4; ++i) a.data()[i] = u(rng);
      a *= 0.4 / *operator_norm(a, spec);
      const TiltedFunctional f(spec, FeasibleSet::full_space(2), MapSpec::affine(a, vec({3 * u(rng), 3 * u(rng)})));
      const Vector fp = *analytic_fixed_point(f.map()).point;
      const auto r = global_minimize([&](const Vector& x) { return displacement(f, x); }, f.set(), spec, 20.0, {});
      CHECK(r.global_value <= 1e-7);
      CHECK(norm(r.clusters[0].point - fp, spec) <= 1e-6);
    }
  }
}

TEST_CASE("brute force examples") {
  const auto line = FeasibleSet::full_space(1);
  const auto wells = brute_force_minima(double_well, line, kLine, 2.0, 4001, 1e-6, 1e-3);
  REQUIRE(wells.clusters.size() == 2);
  for (const auto& c : wells.clusters) CHECK(std::abs(std::abs(c.point[0]) - 1.0) <= 1e-3);

  const auto f = quarter_line();
  const Vector y = vec({4});
  const auto tilt = brute_force_minima([&](const Vector& x) { return tilted_value(f, x, y); }, line, kLine, 2.0, 4001,
                                       1e-6, 1e-3);
  REQUIRE(tilt.clusters.size() == 1);
  CHECK(std::abs(tilt.clusters[0].point[0]) <= 1e-3);
  CHECK(std::abs(tilt.global_value + 4.0) <= 1e-3);

  const auto l1 = NormSpec::lp(Exponent::finite(1), 2);
  const auto orthant = FeasibleSet::orthant(vec({0, 0}));
  const auto corner = brute_force_minima([&](const Vector& x) { return norm(x, l1); }, orthant, l1, 1.0, 101, 1e-6, 1e-3);
  REQUIRE(corner.clusters.size() == 1);
  CHECK(corner.clusters[0].point == vec({0, 0}));
  CHECK(corner.global_value == 0.0);
}

TEST_CASE("brute force guard") {
  const auto cube = FeasibleSet::full_space(3);
  const auto spec = NormSpec::lp(Exponent::finite(2), 3);
  CHECK_THROWS_AS(brute_force_minima([](const Vector&) { return 0.0; }, cube, spec, 1.0, 1000, 1e-6, 1e-3), InputError);
}

TEST_CASE("infeasible truncation is a domain error") {
  const auto far = FeasibleSet::orthant(vec({5, 5}));
  const auto spec = NormSpec::lp(Exponent::finite(2), 2);
  CHECK_THROWS_AS(global_minimize([](const Vector& x) { return x.sum(); }, far, spec, 1.0, {}), DomainError);
  CHECK_THROWS_AS(brute_force_minima([](const Vector& x) { return x.sum(); }, far, spec, 1.0, 11, 1e-6, 1e-3),
                  DomainError);
}

TEST_CASE("objective decreasing to the boundary is flagged") {
  const auto r = global_minimize([](const Vector& x) { return -x[0]; }, FeasibleSet::full_space(1), kLine, 3.0, {});
  CHECK(r.status == MinimizationStatus::kNoMinimumSuspected);
  CHECK(r.clusters[0].point[0] == doctest::Approx(3.0));
}

TEST_CASE("budget exhaustion keeps the incumbent") {
  OptimizeConfig cfg;
  cfg.budget = 300;
  const auto r = global_minimize(double_well, FeasibleSet::full_space(1), kLine, 2.0, cfg);
  CHECK(r.status == MinimizationStatus::kBudgetExhausted);
  CHECK_FALSE(r.clusters.empty());
  CHECK(r.evaluations <= cfg.budget);
}

TEST_CASE("pattern search never worsens its start") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3, 3);
  const auto spec = NormSpec::lp(Exponent::infinity(), 2);
  const auto set = FeasibleSet::half_space(vec({1, -1}), -1);
  auto bumpy = [](const Vector& x) { return std::sin(3 * x[0]) * std::cos(2 * x[1]) + 0.1 * x.squaredNorm(); };
  for (int k = 0; k < 200; ++k) {
    const Vector start = project(set, vec({u(rng), u(rng)}));
    if (norm(start, spec) > 4.0) continue;
    const double v0 = bumpy(start);
    const auto r = pattern_search(bumpy, set, spec, 4.0, start, v0, 0.4, 0.5, 1e-9, 10000, k);
    CHECK(r.value <= v0);
    CHECK(contains(set, r.point, 1e-12));
    CHECK(norm(r.point, spec) <= 4.0);
  }
}

TEST_CASE("global_minimize is deterministic and job-count independent") {
  const auto spec = NormSpec::lp(Exponent::finite(2), 2);
  auto rastrigin_like = [](const Vector& x) {
    return x.squaredNorm() - std::cos(2.5 * x[0]) - std::cos(2.5 * x[1]);
  };
  OptimizeConfig cfg;
  cfg.seed = 77;
  const auto set = FeasibleSet::full_space(2);
  const auto a = global_minimize(rastrigin_like, set, spec, 5.0, cfg, 1);
  const auto b = global_minimize(rastrigin_like, set, spec, 5.0, cfg, 1);
  const auto c = global_minimize(rastrigin_like, set, spec, 5.0, cfg, 4);
  CHECK(identical(a, b));
  CHECK(identical(a, c));
  check_result_invariants(a, set, spec, 5.0, cfg.eps_val, cfg.delta_sep);
}

TEST_CASE("cluster_minima applies window and separation") {
  const auto spec = NormSpec::lp(Exponent::finite(2), 1);
  const std::vector<Cluster> sorted = {{vec({0}), 0.0}, {vec({0.0005}), 1e-7}, {vec({1}), 5e-7}, {vec({2}), 1e-5}};
  const auto c = cluster_minima(sorted, spec, 1e-6, 1e-3);
  REQUIRE(c.size() == 2);
  CHECK(c[0].point[0] == 0.0);
  CHECK(c[1].point[0] == 1.0);
}

TEST_CASE("optimizer config validation") {
  OptimizeConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.shrink = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = {};
  cfg.delta_sep = 1e-10;
  CHECK_THROWS_AS(cfg.validate(), InputError);
}
