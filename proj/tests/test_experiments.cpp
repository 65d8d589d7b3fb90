#include <doctest.h>

#include <cmath>
#include <random>

#include "tiltmin/experiments.hpp"

using namespace tiltmin;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

const NormSpec kLine = NormSpec::lp(Exponent::finite(2), 1);

TiltedFunctional quarter_line() {
  return {kLine, FeasibleSet::full_space(1), MapSpec::affine(Matrix::Identity(1, 1) * 0.25, Vector::Zero(1))};
}

GrowthEstimate growth_of(const TiltedFunctional& f) {
  return growth_coefficient(f.map(), f.norm_spec(), f.set(), {1e2, 1e3, 1e4}, 16, 3);
}

double double_well(const Vector& x, const Vector&) {
  const double t = x[0] * x[0] - 1.0;
  return t * t;
}

}  // namespace

TEST_CASE("certify x/4 on three y values") {
  const auto f = quarter_line();
  const std::vector<Vector> ys = {vec({-4}), vec({0}), vec({4})};
  const auto report = certify_uniqueness(f, ys, growth_of(f), {});
  CHECK(report.overall == Verdict::kUniqueOnSamples);
  REQUIRE(report.entries.size() == 3);
  for (const auto& e : report.entries) {
    REQUIRE(e.minimization.clusters.size() == 1);
    // J(x, y) = 0.75|x| - |y - x/4| is minimized at x = 0 for every y
    CHECK(std::abs(e.minimization.clusters[0].point[0]) <= 1e-5);
  }
}

TEST_CASE("certify a constant map") {
  const auto spec = NormSpec::lp(Exponent::finite(2), 2);
  const TiltedFunctional f(spec, FeasibleSet::full_space(2), MapSpec::constant(vec({0, 0})));
  const auto report = certify_uniqueness(f, {vec({1, 2}), vec({-3, 0.5})}, growth_of(f), {});
  CHECK(report.overall == Verdict::kUniqueOnSamples);
  for (const auto& e : report.entries) CHECK(e.minimization.clusters[0].point.norm() <= 1e-5);
}

TEST_CASE("planted double well is refuted") {
  const auto f = quarter_line();
  CertifyOptions opts;
  opts.planted_objective = double_well;
  opts.radius_override = 2.0;
  const auto report = certify_uniqueness(f, {vec({0})}, growth_of(f), {}, opts);
  CHECK(report.overall == Verdict::kMultipleFound);
  CHECK(report.entries[0].minimization.clusters.size() == 2);
}

TEST_CASE("certify without a growth bound is inconclusive") {
  const TiltedFunctional f(kLine, FeasibleSet::full_space(1), MapSpec::affine(Matrix::Identity(1, 1) * 0.7, Vector::Zero(1)));
  const auto g = growth_of(f);
  CHECK_FALSE(g.satisfied);
  const auto report = certify_uniqueness(f, {vec({1})}, g, {});
  CHECK(report.overall != Verdict::kUniqueOnSamples);
  CHECK_THROWS_AS(certify_uniqueness(f, {}, g, {}), InputError);
}

TEST_CASE("find_fixed_point locates the affine fixed point") {
  Matrix a(2, 2);
  a << 0.3, 0.1, -0.05, 0.2;
  for (const auto& p : {Exponent::finite(1), Exponent::finite(2), Exponent::infinity()}) {
    const auto spec = NormSpec::lp(p, 2);
    const TiltedFunctional f(spec, FeasibleSet::full_space(2), MapSpec::affine(a, vec({1, -2})));
    const auto report = find_fixed_point(f, growth_of(f), {}, 500, 9);
    const Vector fp = *analytic_fixed_point(f.map()).point;
    CHECK(norm(report.x_star - fp, spec) <= 1e-5);
    CHECK(report.passed());
    CHECK(report.criterion_excess <= 1e-12);
  }
}

TEST_CASE("find_fixed_point preconditions") {
  const TiltedFunctional f(kLine, FeasibleSet::full_space(1), MapSpec::affine(Matrix::Identity(1, 1) * 0.7, Vector::Zero(1)));
  CHECK_THROWS_AS(find_fixed_point(f, growth_of(f), {}, 10, 1), PreconditionError);
}

TEST_CASE("verify_saddle examples") {
  const auto f = quarter_line();
  const auto j = as_bifunctional(f);
  std::vector<Vector> grid;
  for (int k = -500; k <= 500; ++k) grid.push_back(vec({0.01 * k}));
  const auto ok = verify_saddle(j, vec({0}), grid, grid, 1e-6);
  CHECK(ok.passed());
  CHECK(ok.max_value <= 1e-12);

  const GenericBifunctional zero{[](const Vector&, const Vector&) { return 0.0; }, FeasibleSet::full_space(1), kLine,
                                 true, true};
  const auto flat = verify_saddle(zero, vec({0}), grid, grid, 1e-6);
  CHECK(flat.max_ok);
  CHECK_FALSE(flat.strict_ok);

  const GenericBifunctional bowl{[](const Vector& x, const Vector& y) { return x[0] * x[0] - y[0] * y[0]; },
                                 FeasibleSet::full_space(1), kLine, true, true};
  CHECK(verify_saddle(bowl, vec({0}), grid, grid, 1e-6).passed());
  CHECK_FALSE(verify_saddle(bowl, vec({1}), grid, grid, 1e-6).passed());

  const GenericBifunctional lopsided{[](const Vector& x, const Vector&) { return x[0]; }, FeasibleSet::full_space(1),
                                     kLine, false, true};
  CHECK_THROWS_AS(verify_saddle(lopsided, vec({0}), grid, grid, 1e-6), InputError);
}

TEST_CASE("minimax gap examples") {
  const auto j = as_bifunctional(quarter_line());
  const auto r = minimax_gap(j, 8.0, 33);
  CHECK(std::abs(r.gap) <= 1e-4);
  CHECK(std::abs(r.upper) <= 1e-4);
  CHECK(r.weak_duality_ok);

  const GenericBifunctional zero{[](const Vector&, const Vector&) { return 0.0; }, FeasibleSet::full_space(1), kLine,
                                 true, true};
  const auto z = minimax_gap(zero, 1.0, 9);
  CHECK(z.gap == 0.0);
  CHECK(z.lower == 0.0);

  // x*y on [-1, 1]^2: saddle value 0 at the origin
  const GenericBifunctional bilinear{[](const Vector& x, const Vector& y) { return x[0] * y[0]; },
                                     FeasibleSet::full_space(1), kLine, false, false};
  const auto b = minimax_gap(bilinear, 1.0, 21);
  CHECK(std::abs(b.upper) <= 1e-6);
  CHECK(std::abs(b.lower) <= 1e-6);
  CHECK(b.weak_duality_ok);
}

TEST_CASE("weak duality on seeded affine instances") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto spec = NormSpec::lp(Exponent::finite(2), 2);
  for (int trial = 0; trial < 3; ++trial) {
    Matrix a(2, 2);
    for (int i = 0; i < 4; ++i) a.data()[i] = u(rng);
    a *= 0.3 / spectral_norm(a);
    const TiltedFunctional f(spec, FeasibleSet::full_space(2), MapSpec::affine(a, vec({u(rng), u(rng)})));
    const auto r = minimax_gap(as_bifunctional(f), 4.0, 9);
    CHECK(r.lower <= r.upper + 2e-6);
  }
}

TEST_CASE("fixed points are exactly the zeros of the displacement") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto spec = NormSpec::lp(Exponent::finite(2), 2);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a(2, 2);
    for (int i = 0; i < 4; ++i) a.data()[i] = 0.4 * u(rng);
    const TiltedFunctional f(spec, FeasibleSet::full_space(2), MapSpec::affine(a, vec({u(rng), u(rng)})));
    const Vector fp = *analytic_fixed_point(f.map()).point;
    CHECK(displacement(f, fp) <= 1e-12);
    const Vector off = fp + vec({0.1 * u(rng), 0.1 * u(rng)});
    CHECK(displacement(f, off) > 0.0);
  }
}

TEST_CASE("parameter range and family instantiation") {
  CHECK(ParameterRange{0.1, 0.45, 8}.values().size() == 8);
  CHECK(ParameterRange{0.1, 0.45, 8}.values().back() == 0.45);
  CHECK(ParameterRange{0.2, 0.9, 1}.values() == std::vector<double>{0.2});
  MapFamilyTemplate rot{FamilyKind::kRotationScale, 2, {}, {}, {}};
  const auto m = rot.instantiate(0.5, std::numbers::pi / 2);
  CHECK(evaluate(m, vec({1, 0}), FeasibleSet::full_space(2)).isApprox(vec({0, 0.5}), 1e-15));
  CHECK(family_kind_from_string("rotation_scale") == FamilyKind::kRotationScale);
  CHECK_FALSE(family_kind_from_string("shear"));
}

TEST_CASE("sweep over a contracting scaled identity finds nothing") {
  MapFamilyTemplate family{FamilyKind::kScaledIdentity, 2, {0.1, 0.45, 8}, {0, 0, 1}, {}};
  YGridSpec grid{5, 2.0};
  OptimizeConfig cfg;
  cfg.grid_resolution = 17;
  cfg.multistart = 8;
  cfg.random_starts = 2;
  const auto report = search_counterexample(family, FeasibleSet::full_space(2), {NormSpec::lp(Exponent::finite(2), 2)},
                                            grid, {}, cfg);
  CHECK(report.cells_total == 8);
  CHECK(report.cells_run == 8);
  CHECK(report.entries == 8 * 25);
  CHECK(report.candidates.empty());
}

TEST_CASE("sweep reports the planted cell") {
  MapFamilyTemplate family{FamilyKind::kScaledIdentity, 1, {0.1, 0.4, 4}, {0, 0, 1}, {}};
  SweepConfig sweep;
  sweep.planted = PlantedCell{2, 1, double_well};
  OptimizeConfig cfg;
  cfg.grid_resolution = 17;
  const auto report = search_counterexample(family, FeasibleSet::full_space(1), {kLine}, {3, 2.0}, sweep, cfg);
  REQUIRE(report.candidates.size() == 1);
  CHECK(report.candidates[0].planted);
  CHECK(report.candidates[0].cell == 2);
  CHECK(report.candidates[0].y_index == 1);
  CHECK(report.candidates[0].verified_clusters == 2);
}
