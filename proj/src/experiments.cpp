#include "tiltmin/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "tiltmin/parallel.hpp"

namespace tiltmin {

namespace {

constexpr double kMinRadius = 1.0;
constexpr std::int64_t kEnvelopeBudget = 10'000'000;

std::vector<Vector> local_points(const FeasibleSet& set, const Vector& center, double scale, int count,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    Vector x = center;
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += scale * unit(rng);
    if (set.violation(x) > 0.0) x = project(set, x);
    out.push_back(std::move(x));
  }
  return out;
}

// Half of the points from the global ball, half from a unit box around `center`.
std::vector<Vector> check_points(const FeasibleSet& set, const NormSpec& spec, double radius, const Vector& center,
                                 int count, std::uint64_t seed) {
  const int global = count - count / 2;
  auto pts = random_feasible_points(set, spec, radius, global, derive_seed(seed, 0));
  auto near = local_points(set, center, 1.0, count - static_cast<int>(pts.size()), derive_seed(seed, 1));
  pts.insert(pts.end(), std::make_move_iterator(near.begin()), std::make_move_iterator(near.end()));
  return pts;
}

struct Extremum {
  double value = 0.0;
  Vector arg;
};

// Grid scan followed by pattern search from the best grid point and any hints.
Extremum minimize_on_grid(const Objective& fn, const std::vector<Vector>& grid, const FeasibleSet& set,
                          const NormSpec& spec, double radius, const std::vector<Vector>& hints,
                          double termination_step, int jobs) {
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) { values[i] = fn(grid[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  std::vector<Cluster> starts = {{grid[best], values[best]}};
  for (const auto& h : hints) starts.push_back({h, fn(h)});

  Extremum out{std::numeric_limits<double>::infinity(), grid[best]};
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const auto r = pattern_search(fn, set, spec, radius, starts[s].point, starts[s].value, radius / 10.0, 0.5,
                                  termination_step, kEnvelopeBudget, s);
    if (r.value < out.value) out = {r.value, r.point};
  }
  return out;
}

bool on_boundary(const Vector& x, const NormSpec& spec, double radius, double delta_sep) {
  return radius - norm(x, spec) <= delta_sep;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kUniqueOnSamples:
      return "UNIQUE_ON_SAMPLES";
    case Verdict::kMultipleFound:
      return "MULTIPLE_FOUND";
    case Verdict::kInconclusive:
      return "INCONCLUSIVE";
    case Verdict::kVacuous:
      return "VACUOUS";
  }
  return "INCONCLUSIVE";
}

// ---------------------------------------------------------------------------

UniquenessEntry certify_point(const TiltedFunctional& f, const Vector& y, const GrowthEstimate& growth,
                              const OptimizeConfig& config, const CertifyOptions& options) {
  const auto& set = f.set();
  if (y.size() != f.dimension()) throw InputError("certify: y has the wrong dimension");
  if (set.violation(y) > kMembershipTol) throw InputError("certify: y lies outside the feasible set");

  Objective objective;
  if (options.planted_objective) {
    objective = [&planted = options.planted_objective, y](const Vector& x) { return planted(x, y); };
  } else {
    objective = [&f, y](const Vector& x) {
      return tilted_value_given(f, x, evaluate(f.map(), x, f.set()), y);
    };
  }

  UniquenessEntry entry;
  entry.y = y;
  const Vector fy = evaluate(f.map(), y, set);
  entry.incumbent = std::min({objective(y), objective(set.witness().base), objective(fy)});

  const bool trusted = options.radius_override.has_value() || growth.satisfied;
  if (options.radius_override) {
    entry.radius = *options.radius_override;
  } else if (growth.satisfied) {
    const auto bound = conditional_bound(growth);
    entry.radius = std::max(kMinRadius, coercivity_radius(f, y, bound.kappa, bound.r0, entry.incumbent, options.margin));
  } else {
    entry.radius = options.fallback_radius;
  }

  entry.minimization = global_minimize(objective, set, f.norm_spec(), entry.radius, config, 1);
  if (entry.minimization.clusters.size() >= 2) {
    entry.verdict = Verdict::kMultipleFound;
  } else if (entry.minimization.status == MinimizationStatus::kNoMinimumSuspected) {
    entry.verdict = Verdict::kVacuous;
  } else if (entry.minimization.status == MinimizationStatus::kBudgetExhausted || !trusted) {
    entry.verdict = Verdict::kInconclusive;
  } else {
    entry.verdict = Verdict::kUniqueOnSamples;
  }
  return entry;
}

UniquenessReport certify_uniqueness(const TiltedFunctional& f, const std::vector<Vector>& y_samples,
                                    const GrowthEstimate& growth, const OptimizeConfig& config,
                                    const CertifyOptions& options) {
  if (y_samples.empty()) throw InputError("certify: y_samples must be non-empty");
  config.validate();
  UniquenessReport report;
  report.eps_val = config.eps_val;
  report.delta_sep = config.delta_sep;
  report.kappa_method = growth.method;
  report.kappa_hat = growth.kappa_hat;
  report.kappa_satisfied = growth.satisfied;
  report.radius_override = options.radius_override.has_value();

  report.entries.resize(y_samples.size());
  parallel_for(y_samples.size(), options.jobs,
               [&](std::size_t i) { report.entries[i] = certify_point(f, y_samples[i], growth, config, options); });

  auto any = [&](Verdict v) {
    return std::any_of(report.entries.begin(), report.entries.end(), [v](const auto& e) { return e.verdict == v; });
  };
  if (any(Verdict::kMultipleFound)) {
    report.overall = Verdict::kMultipleFound;
  } else if (any(Verdict::kVacuous)) {
    report.overall = Verdict::kVacuous;
  } else if (any(Verdict::kInconclusive)) {
    report.overall = Verdict::kInconclusive;
  } else {
    report.overall = Verdict::kUniqueOnSamples;
  }
  return report;
}

// ---------------------------------------------------------------------------

void SaddleReport::update_flags() {
  residual_ok = residual <= residual_tol;
  min_ok = min_check <= saddle_tol;
  strict_ok = x_samples > 0 && strict_check > 0.0;
  displacement_ok = x_samples > 0 && displacement_margin > 0.0;
  criterion_ok = criterion_excess <= criterion_tol;
}

FixedPointNotLocated::FixedPointNotLocated(SaddleReport report)
    : Error(fmt::format("fixed point not located: residual {:.17g} after the full budget", report.residual)),
      report_(std::move(report)) {}

SaddleReport find_fixed_point(const TiltedFunctional& f, const GrowthEstimate& growth, const OptimizeConfig& config,
                              int check_samples, std::uint64_t seed, const FixedPointOptions& options) {
  if (!growth.satisfied) {
    throw PreconditionError("find_fixed_point: growth bound fails (kappa_hat >= 1/2); existence hypotheses unmet");
  }
  if (check_samples < 1) throw InputError("find_fixed_point: check_samples must be >= 1");
  const auto& set = f.set();
  const auto& spec = f.norm_spec();
  const auto bound = conditional_bound(growth);

  const Vector& base = set.witness().base;
  const double phi_base = displacement(f, base);
  // Phi(x) >= J(x, base) > Phi(base) beyond this radius.
  const double radius =
      std::max(kMinRadius, coercivity_radius(f, base, bound.kappa, bound.r0, phi_base, options.margin));

  SaddleReport report;
  report.radius = radius;
  report.kappa_method = growth.method;
  report.kappa_hat = growth.kappa_hat;
  report.minimization = global_minimize([&f](const Vector& x) { return displacement(f, x); }, set, spec, radius,
                                        config, options.jobs);
  report.x_star = report.minimization.clusters.front().point;
  const Vector fx_star = evaluate(f.map(), report.x_star, set);
  report.residual = norm(report.x_star - fx_star, spec);

  const double check_radius = std::max(options.check_radius, 2.0 * norm(report.x_star, spec) + 1.0);
  const auto ys = check_points(set, spec, check_radius, report.x_star, check_samples, derive_seed(seed, 11));
  const auto xs = check_points(set, spec, check_radius, report.x_star, check_samples, derive_seed(seed, 12));

  report.min_check = -std::numeric_limits<double>::infinity();
  for (const auto& y : ys) {
    const double v = tilted_value_given(f, report.x_star, fx_star, y);
    if (v > report.min_check) {
      report.min_check = v;
      report.min_witness = y;
    }
  }
  report.y_samples = static_cast<int>(ys.size());

  report.strict_check = std::numeric_limits<double>::infinity();
  report.displacement_margin = std::numeric_limits<double>::infinity();
  report.criterion_excess = -std::numeric_limits<double>::infinity();
  for (const auto& x : xs) {
    const Vector fx = evaluate(f.map(), x, set);
    const double phi = norm(x - fx, spec);
    const Vector ffx = evaluate(f.map(), fx, set);
    const double criterion = norm(fx - ffx, spec) - norm(x - ffx, spec);
    report.criterion_excess = std::max(report.criterion_excess, criterion - phi);

    if (norm(x - report.x_star, spec) < config.delta_sep) continue;
    ++report.x_samples;
    const double j = tilted_value_given(f, x, fx, report.x_star);
    if (j < report.strict_check) {
      report.strict_check = j;
      report.strict_witness = x;
    }
    report.displacement_margin = std::min(report.displacement_margin, phi - norm(report.x_star - fx, spec));
  }
  report.update_flags();
  if (report.residual > options.locate_tol) throw FixedPointNotLocated(report);
  return report;
}

SaddleCheck verify_saddle(const GenericBifunctional& j, const Vector& x_star, const std::vector<Vector>& y_grid,
                          const std::vector<Vector>& x_grid, double tol, double delta_sep) {
  if (!j.zero_diagonal) throw InputError("verify_saddle: bifunctional must vanish on the diagonal");
  if (j.domain.violation(x_star) > kMembershipTol) throw InputError("verify_saddle: x_star lies outside the domain");
  if (y_grid.empty() || x_grid.empty()) throw InputError("verify_saddle: sample sets must be non-empty");

  SaddleCheck out;
  out.max_value = -std::numeric_limits<double>::infinity();
  for (const auto& y : y_grid) {
    const double v = j(x_star, y);
    if (v > out.max_value) {
      out.max_value = v;
      out.max_witness = y;
    }
  }
  out.min_value = std::numeric_limits<double>::infinity();
  out.min_far_value = std::numeric_limits<double>::infinity();
  for (const auto& x : x_grid) {
    const double v = j(x, x_star);
    out.min_value = std::min(out.min_value, v);
    if (norm(x - x_star, j.norm) >= delta_sep && v < out.min_far_value) {
      out.min_far_value = v;
      out.min_far_witness = x;
    }
  }
  out.max_ok = out.max_value <= tol;
  out.nonnegative_ok = out.min_value > -tol;
  out.strict_ok = out.min_far_witness.size() > 0 && out.min_far_value > 0.0;
  return out;
}

// ---------------------------------------------------------------------------

MinimaxResult minimax_gap(const GenericBifunctional& j, double radius, int resolution, const MinimaxOptions& options) {
  if (!(radius > 0.0)) throw InputError("minimax_gap: radius must be positive");
  if (resolution < 1) throw InputError("minimax_gap: resolution must be >= 1");
  const auto& set = j.domain;
  const auto& spec = j.norm;
  const auto grid = SampleDomain(set, spec, radius, resolution).points();
  if (grid.empty()) throw DomainError("minimax_gap: no grid point of X within the radius");
  const double term = options.termination_step;

  // inf_x sup_y J
  auto upper_envelope = [&](const Vector& x) {
    return -minimize_on_grid([&](const Vector& y) { return -j(x, y); }, grid, set, spec, radius, {}, term, 1).value;
  };
  const auto upper = minimize_on_grid(upper_envelope, grid, set, spec, radius, {}, term, options.jobs);

  // sup_y inf_x J, each inner minimization also started from the upper witness
  const std::vector<Vector> hint = {upper.arg};
  auto negated_lower_envelope = [&](const Vector& y) {
    return -minimize_on_grid([&](const Vector& x) { return j(x, y); }, grid, set, spec, radius, hint, term, 1).value;
  };
  const auto lower = minimize_on_grid(negated_lower_envelope, grid, set, spec, radius, {}, term, options.jobs);

  MinimaxResult out;
  out.tol = options.tol;
  out.upper = upper.value;
  out.lower = -lower.value;
  out.gap = out.upper - out.lower;
  out.x_witness = upper.arg;
  out.y_witness = lower.arg;
  out.x_on_boundary = on_boundary(out.x_witness, spec, radius, options.delta_sep);
  out.y_on_boundary = on_boundary(out.y_witness, spec, radius, options.delta_sep);
  out.witness_distance = norm(out.x_witness - out.y_witness, spec);
  out.witnesses_coincide = out.witness_distance <= options.delta_sep;
  out.weak_duality_ok = out.lower <= out.upper + 2.0 * options.tol;
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(FamilyKind k) {
  return k == FamilyKind::kScaledIdentity ? "scaled_identity" : "rotation_scale";
}

std::optional<FamilyKind> family_kind_from_string(const std::string& name) {
  if (name == "scaled_identity") return FamilyKind::kScaledIdentity;
  if (name == "rotation_scale") return FamilyKind::kRotationScale;
  return std::nullopt;
}

std::vector<double> ParameterRange::values() const {
  if (count < 1) throw InputError("parameter range: count must be >= 1");
  if (count == 1) return {min};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = min + (max - min) * i / (count - 1);
  out.back() = max;
  return out;
}

MapSpec MapFamilyTemplate::instantiate(double theta_value, double phi_value) const {
  const Vector b = offset.size() == 0 ? Vector::Zero(dimension) : offset;
  if (b.size() != dimension) throw InputError("map family: offset dimension disagrees");
  if (kind == FamilyKind::kScaledIdentity) {
    return MapSpec::affine(theta_value * Matrix::Identity(dimension, dimension), b);
  }
  if (dimension != 2) throw InputError("map family: rotation_scale needs dimension 2");
  Matrix r(2, 2);
  r << std::cos(phi_value), -std::sin(phi_value), std::sin(phi_value), std::cos(phi_value);
  return MapSpec::affine(theta_value * r, b);
}

std::vector<Vector> box_grid_points(const FeasibleSet& set, double extent, int per_axis) {
  const int n = set.dimension();
  const SampleDomain box(set, NormSpec::lp(Exponent::infinity(), n), extent, per_axis);
  std::vector<Vector> out;
  std::set<std::vector<double>> seen;
  for (std::int64_t i = 0; i < box.node_count(); ++i) {
    Vector y = box.node(i);
    if (set.violation(y) > 0.0) y = project(set, y);
    if (!seen.emplace(y.data(), y.data() + y.size()).second) continue;
    out.push_back(std::move(y));
  }
  return out;
}

SweepReport search_counterexample(const MapFamilyTemplate& family, const FeasibleSet& set,
                                  const std::vector<NormSpec>& norms, const YGridSpec& y_grid,
                                  const SweepConfig& sweep, const OptimizeConfig& config) {
  if (norms.empty()) throw InputError("sweep: at least one norm is required");
  config.validate();
  const auto thetas = family.theta.values();
  const auto phis = family.phi.values();
  const auto ys = box_grid_points(set, y_grid.extent, y_grid.per_axis);

  OptimizeConfig verify_config = config;
  verify_config.grid_resolution = 4 * (config.grid_resolution - 1) + 1;
  verify_config.eps_val = config.eps_val / 2.0;

  struct CellOutcome {
    bool range_skip = false;
    bool growth_skip = false;
    std::size_t entries = 0;
    std::size_t vacuous = 0;
    std::vector<CounterexampleCandidate> found;
  };

  SweepReport report;
  report.cells_total = thetas.size() * phis.size() * norms.size();
  report.verify_resolution = verify_config.grid_resolution;
  report.verify_eps_val = verify_config.eps_val;
  std::vector<CellOutcome> outcomes(report.cells_total);

  parallel_for(report.cells_total, sweep.jobs, [&](std::size_t cell) {
    const std::size_t norm_index = cell % norms.size();
    const std::size_t phi_index = (cell / norms.size()) % phis.size();
    const std::size_t theta_index = cell / (norms.size() * phis.size());
    const double theta = thetas[theta_index];
    const double phi = phis[phi_index];
    const auto& spec = norms[norm_index];
    auto& outcome = outcomes[cell];

    const MapSpec map = family.instantiate(theta, phi);
    const TiltedFunctional f(spec, set, map);
    try {
      for (const auto& x : random_feasible_points(set, spec, 10.0, sweep.range_check_samples,
                                                  derive_seed(sweep.seed, cell))) {
        evaluate(map, x, set);
      }
      evaluate(map, set.witness().base, set);
    } catch (const RangeViolationError&) {
      outcome.range_skip = true;
      return;
    }
    const auto growth = growth_coefficient(map, spec, set, {1e2, 1e3, 1e4}, 16, derive_seed(sweep.seed, cell));
    if (!growth.satisfied) {
      outcome.growth_skip = true;
      return;
    }

    for (std::size_t yi = 0; yi < ys.size(); ++yi) {
      CertifyOptions opts;
      opts.margin = sweep.margin;
      const bool planted = sweep.planted && sweep.planted->cell == cell && sweep.planted->y_index == yi;
      if (planted) opts.planted_objective = sweep.planted->objective;
      const auto entry = certify_point(f, ys[yi], growth, config, opts);
      ++outcome.entries;
      if (entry.verdict == Verdict::kVacuous) ++outcome.vacuous;
      if (entry.minimization.clusters.size() < 2) continue;

      CounterexampleCandidate cand;
      cand.cell = cell;
      cand.theta = theta;
      cand.phi = phi;
      cand.norm_index = norm_index;
      cand.y_index = yi;
      cand.y = ys[yi];
      cand.radius = entry.radius;
      cand.clusters = entry.minimization.clusters;
      cand.value_gap = cand.clusters[1].value - cand.clusters[0].value;
      cand.separation = norm(cand.clusters[1].point - cand.clusters[0].point, spec);
      cand.score = cand.separation / (cand.value_gap + 1e-12);
      cand.kappa_method = growth.method;
      cand.planted = planted;

      CertifyOptions verify_opts = opts;
      verify_opts.radius_override = entry.radius;
      const auto again = certify_point(f, ys[yi], growth, verify_config, verify_opts);
      cand.verified_clusters = again.minimization.clusters.size();
      cand.verified = cand.verified_clusters >= 2;
      outcome.found.push_back(std::move(cand));
    }
  });

  for (auto& outcome : outcomes) {
    if (outcome.range_skip) {
      ++report.skipped_range;
      continue;
    }
    if (outcome.growth_skip) {
      ++report.skipped_growth;
      continue;
    }
    ++report.cells_run;
    report.entries += outcome.entries;
    report.vacuous_entries += outcome.vacuous;
    for (auto& c : outcome.found) (c.verified ? report.candidates : report.rejected).push_back(std::move(c));
  }
  std::stable_sort(report.candidates.begin(), report.candidates.end(),
                   [](const CounterexampleCandidate& a, const CounterexampleCandidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.cell != b.cell) return a.cell < b.cell;
                     return a.y_index < b.y_index;
                   });
  return report;
}

}  // namespace tiltmin
