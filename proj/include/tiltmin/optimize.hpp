#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tiltmin/spaces.hpp"

namespace tiltmin {

struct OptimizeConfig {
  int grid_resolution = 33;
  int multistart = 32;
  /// Seeded random feasible starts added to the best grid points.
  int random_starts = 8;
  /// Pattern-search initial step; radius / 10 when unset.
  std::optional<double> initial_step;
  double shrink = 0.5;
  double termination_step = 1e-9;
  double eps_val = 1e-6;
  double delta_sep = 1e-3;
  std::int64_t budget = 1'000'000;
  std::uint64_t seed = 0;

  /// Throws InputError on out-of-range fields.
  void validate() const;

  friend bool operator==(const OptimizeConfig&, const OptimizeConfig&) = default;
};

enum class MinimizationStatus { kOk, kBudgetExhausted, kNoMinimumSuspected };
std::string to_string(MinimizationStatus s);

struct Cluster {
  Vector point;
  double value = 0.0;
};

struct MinimizationResult {
  /// Sorted by value; representatives pairwise >= delta_sep apart.
  std::vector<Cluster> clusters;
  double global_value = 0.0;
  MinimizationStatus status = MinimizationStatus::kOk;
  std::int64_t evaluations = 0;
  double radius = 0.0;
};

using Objective = std::function<double(const Vector&)>;

/// Minimizes over X intersected with {|x| <= radius}: coarse grid scan, multistart
/// pattern search, then clustering of near-optimal endpoints. Deterministic in
/// (config, seed) for any number of jobs.
MinimizationResult global_minimize(const Objective& objective, const FeasibleSet& set, const NormSpec& norm,
                                   double radius, const OptimizeConfig& config, int jobs = 1);

/// Exhaustive grid scan with the same clustering rule and no refinement.
/// Candidates are grid-local minima. Throws InputError when resolution^n > 1e8.
MinimizationResult brute_force_minima(const Objective& objective, const FeasibleSet& set, const NormSpec& norm,
                                      double radius, int resolution, double eps_val, double delta_sep);

struct PatternSearchResult {
  Vector point;
  double value = 0.0;
  std::int64_t evaluations = 0;
  bool budget_exhausted = false;
};

/// Pattern search from `start`. Polls the 2n coordinate directions first, then
/// sign-pattern diagonals and a few seeded random directions before shrinking.
/// Every trial point is projected into X; trials outside the ball are rejected.
PatternSearchResult pattern_search(const Objective& objective, const FeasibleSet& set, const NormSpec& norm,
                                   double radius, const Vector& start, double start_value, double initial_step,
                                   double shrink, double termination_step, std::int64_t budget,
                                   std::uint64_t seed);

/// Greedy clustering of (point, value) candidates already sorted by value:
/// keeps those within eps_val of the best and merges any closer than delta_sep
/// to an earlier representative.
std::vector<Cluster> cluster_minima(const std::vector<Cluster>& sorted_candidates, const NormSpec& norm,
                                    double eps_val, double delta_sep);

}  // namespace tiltmin
