#include "tiltmin/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "tiltmin/parallel.hpp"

namespace tiltmin {

namespace {

// Sign-pattern directions with at least two non-zero entries, unit length.
// Full {-1,0,1}^n for n <= 4, pairwise combinations above that.
std::vector<Vector> diagonal_directions(int n) {
  std::vector<Vector> dirs;
  if (n <= 4) {
    const int total = static_cast<int>(std::pow(3, n));
    for (int code = 0; code < total; ++code) {
      int c = code;
      Vector d(n);
      int nonzero = 0;
      for (int i = 0; i < n; ++i) {
        d[i] = static_cast<double>(c % 3) - 1.0;
        c /= 3;
        nonzero += d[i] != 0.0 ? 1 : 0;
      }
      if (nonzero >= 2) dirs.push_back(d.normalized());
    }
    return dirs;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (double si : {1.0, -1.0}) {
        for (double sj : {1.0, -1.0}) {
          Vector d = Vector::Zero(n);
          d[i] = si;
          d[j] = sj;
          dirs.push_back(d.normalized());
        }
      }
    }
  }
  return dirs;
}

int effective_resolution(const OptimizeConfig& config, int n) {
  // the coarse scan may use at most a quarter of the evaluation budget
  const double cap = std::max(1.0, static_cast<double>(config.budget) / 4.0);
  int res = config.grid_resolution;
  while (res > 2 && std::pow(static_cast<double>(res), n) > cap) --res;
  return res;
}

MinimizationStatus boundary_status(const std::vector<Cluster>& clusters, const NormSpec& norm_spec, double radius,
                                   double delta_sep) {
  if (!clusters.empty() && radius - norm(clusters.front().point, norm_spec) <= delta_sep) {
    return MinimizationStatus::kNoMinimumSuspected;
  }
  return MinimizationStatus::kOk;
}

bool less_by_value_then_index(const std::pair<double, std::size_t>& a, const std::pair<double, std::size_t>& b) {
  if (a.first != b.first) return a.first < b.first;
  return a.second < b.second;
}

}  // namespace

std::string to_string(MinimizationStatus s) {
  switch (s) {
    case MinimizationStatus::kOk:
      return "OK";
    case MinimizationStatus::kBudgetExhausted:
      return "BUDGET_EXHAUSTED";
    case MinimizationStatus::kNoMinimumSuspected:
      return "NO_MINIMUM_SUSPECTED";
  }
  return "OK";
}

void OptimizeConfig::validate() const {
  if (grid_resolution < 1) throw InputError("optimizer.grid_resolution must be >= 1");
  if (multistart < 1) throw InputError("optimizer.multistart must be >= 1");
  if (random_starts < 0) throw InputError("optimizer.random_starts must be >= 0");
  if (initial_step && !(*initial_step > 0.0)) throw InputError("optimizer.initial_step must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InputError("optimizer.shrink must lie in (0, 1)");
  if (!(termination_step > 0.0)) throw InputError("optimizer.termination_step must be positive");
  if (!(eps_val > 0.0)) throw InputError("optimizer.eps_val must be positive");
  if (!(delta_sep > 0.0)) throw InputError("optimizer.delta_sep must be positive");
  if (!(delta_sep > termination_step)) throw InputError("optimizer.delta_sep must exceed optimizer.termination_step");
  if (budget < 1) throw InputError("optimizer.budget must be >= 1");
}

std::vector<Cluster> cluster_minima(const std::vector<Cluster>& sorted_candidates, const NormSpec& norm_spec,
                                    double eps_val, double delta_sep) {
  std::vector<Cluster> clusters;
  if (sorted_candidates.empty()) return clusters;
  const double best = sorted_candidates.front().value;
  for (const auto& c : sorted_candidates) {
    if (c.value > best + eps_val) break;
    const bool separate = std::all_of(clusters.begin(), clusters.end(), [&](const Cluster& rep) {
      return norm(c.point - rep.point, norm_spec) >= delta_sep;
    });
    if (separate) clusters.push_back(c);
  }
  return clusters;
}

PatternSearchResult pattern_search(const Objective& objective, const FeasibleSet& set, const NormSpec& norm_spec,
                                   double radius, const Vector& start, double start_value, double initial_step,
                                   double shrink, double termination_step, std::int64_t budget,
                                   std::uint64_t seed) {
  const int n = set.dimension();
  PatternSearchResult out{start, start_value, 0, false};
  std::vector<Vector> axes;
  for (int i = 0; i < n; ++i) {
    axes.push_back(Vector::Unit(n, i));
    axes.push_back(-Vector::Unit(n, i));
  }
  const std::vector<Vector> diagonals = diagonal_directions(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double step = initial_step;
  auto try_direction = [&](const Vector& d) -> bool {
    if (out.evaluations >= budget) {
      out.budget_exhausted = true;
      return false;
    }
    Vector trial = out.point + step * d;
    if (set.violation(trial) > 0.0) trial = project(set, trial);
    if (norm(trial, norm_spec) > radius) return false;
    if (trial == out.point) return false;
    const double v = objective(trial);
    ++out.evaluations;
    if (v < out.value) {
      out.point = std::move(trial);
      out.value = v;
      return true;
    }
    return false;
  };
  auto poll = [&](const std::vector<Vector>& dirs) {
    for (const auto& d : dirs) {
      if (try_direction(d)) return true;
      if (out.budget_exhausted) return false;
    }
    return false;
  };

  while (step >= termination_step && !out.budget_exhausted) {
    bool improved = poll(axes) || poll(diagonals);
    if (!improved && !out.budget_exhausted) {
      std::vector<Vector> random_dirs;
      for (int k = 0; k < n; ++k) {
        Vector d(n);
        for (int i = 0; i < n; ++i) d[i] = gauss(rng);
        const double len = d.norm();
        if (len == 0.0) continue;
        random_dirs.push_back(d / len);
        random_dirs.push_back(-d / len);
      }
      improved = poll(random_dirs);
    }
    if (improved) {
      step = std::min(step / shrink, initial_step);
    } else {
      step *= shrink;
    }
  }
  return out;
}

MinimizationResult global_minimize(const Objective& objective, const FeasibleSet& set, const NormSpec& norm_spec,
                                   double radius, const OptimizeConfig& config, int jobs) {
  config.validate();
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("global_minimize: radius must be positive");
  if (set.dimension() != norm_spec.dimension()) throw InputError("global_minimize: set and norm dimensions disagree");
  const int n = set.dimension();

  MinimizationResult result;
  result.radius = radius;

  const SampleDomain domain(set, norm_spec, radius, effective_resolution(config, n));
  const std::vector<Vector> grid = domain.points();
  if (grid.empty()) {
    throw DomainError(fmt::format("infeasible truncation: no grid point of X within radius {:.17g}", radius));
  }
  std::vector<double> grid_values(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) { grid_values[i] = objective(grid[i]); });
  result.evaluations += static_cast<std::int64_t>(grid.size());

  std::vector<std::pair<double, std::size_t>> order(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) order[i] = {grid_values[i], i};
  std::sort(order.begin(), order.end(), less_by_value_then_index);

  std::vector<Cluster> starts;
  const auto grid_starts = std::min(order.size(), static_cast<std::size_t>(config.multistart));
  for (std::size_t k = 0; k < grid_starts; ++k) starts.push_back({grid[order[k].second], order[k].first});
  const auto extra = random_feasible_points(set, norm_spec, radius, config.random_starts, derive_seed(config.seed, 1));
  for (const auto& x : extra) {
    starts.push_back({x, objective(x)});
    ++result.evaluations;
  }

  const std::int64_t remaining = std::max<std::int64_t>(0, config.budget - result.evaluations);
  const std::int64_t per_start = remaining / static_cast<std::int64_t>(starts.size());
  const double step0 = config.initial_step.value_or(radius / 10.0);

  std::vector<PatternSearchResult> refined(starts.size());
  parallel_for(starts.size(), jobs, [&](std::size_t i) {
    refined[i] = pattern_search(objective, set, norm_spec, radius, starts[i].point, starts[i].value, step0,
                                config.shrink, config.termination_step, per_start,
                                derive_seed(config.seed, 1000 + i));
  });

  bool exhausted = result.evaluations >= config.budget;
  std::vector<std::pair<double, std::size_t>> ranked(refined.size());
  for (std::size_t i = 0; i < refined.size(); ++i) {
    result.evaluations += refined[i].evaluations;
    exhausted = exhausted || refined[i].budget_exhausted;
    ranked[i] = {refined[i].value, i};
  }
  std::sort(ranked.begin(), ranked.end(), less_by_value_then_index);
  std::vector<Cluster> candidates;
  candidates.reserve(ranked.size());
  for (const auto& [value, idx] : ranked) candidates.push_back({refined[idx].point, value});

  result.clusters = cluster_minima(candidates, norm_spec, config.eps_val, config.delta_sep);
  result.global_value = result.clusters.front().value;
  result.status = exhausted ? MinimizationStatus::kBudgetExhausted
                            : boundary_status(result.clusters, norm_spec, radius, config.delta_sep);
  return result;
}

MinimizationResult brute_force_minima(const Objective& objective, const FeasibleSet& set, const NormSpec& norm_spec,
                                      double radius, int resolution, double eps_val, double delta_sep) {
  if (resolution < 1) throw InputError("brute_force_minima: resolution must be >= 1");
  if (!(eps_val > 0.0) || !(delta_sep > 0.0)) throw InputError("brute_force_minima: tolerances must be positive");
  const int n = set.dimension();
  if (std::pow(static_cast<double>(resolution), n) > 1e8) {
    throw InputError("brute_force_minima: resolution^n exceeds the 1e8 node guard");
  }
  const SampleDomain domain(set, norm_spec, radius, resolution);
  const auto total = domain.node_count();

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> values(static_cast<std::size_t>(total), nan);
  MinimizationResult result;
  result.radius = radius;
  for (std::int64_t i = 0; i < total; ++i) {
    auto x = domain.sample(i);
    if (!x) continue;
    values[static_cast<std::size_t>(i)] = objective(*x);
    ++result.evaluations;
  }
  if (result.evaluations == 0) {
    throw DomainError(fmt::format("infeasible truncation: no grid point of X within radius {:.17g}", radius));
  }

  // Grid-local minima; ties go to the lexicographically smaller node.
  std::vector<std::int64_t> stride(static_cast<std::size_t>(n));
  std::int64_t s = 1;
  for (int axis = n - 1; axis >= 0; --axis) {
    stride[static_cast<std::size_t>(axis)] = s;
    s *= resolution;
  }
  std::vector<std::pair<double, std::size_t>> minima;
  for (std::int64_t i = 0; i < total; ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    if (std::isnan(v)) continue;
    bool local = true;
    for (int axis = 0; axis < n && local; ++axis) {
      const auto st = stride[static_cast<std::size_t>(axis)];
      const auto coord = (i / st) % resolution;
      for (int dir : {-1, 1}) {
        if ((dir < 0 && coord == 0) || (dir > 0 && coord == resolution - 1)) continue;
        const auto j = i + dir * st;
        const double w = values[static_cast<std::size_t>(j)];
        if (std::isnan(w)) continue;
        if (w < v || (w == v && j < i)) {
          local = false;
          break;
        }
      }
    }
    if (local) minima.emplace_back(v, static_cast<std::size_t>(i));
  }
  std::sort(minima.begin(), minima.end(), less_by_value_then_index);
  std::vector<Cluster> candidates;
  for (const auto& [v, idx] : minima) {
    if (v > minima.front().first + eps_val) break;
    candidates.push_back({*domain.sample(static_cast<std::int64_t>(idx)), v});
  }
  result.clusters = cluster_minima(candidates, norm_spec, eps_val, delta_sep);
  result.global_value = result.clusters.front().value;
  result.status = boundary_status(result.clusters, norm_spec, radius, delta_sep);
  return result;
}

}  // namespace tiltmin
