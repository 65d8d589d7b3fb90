#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tiltmin/functional.hpp"
#include "tiltmin/maps.hpp"
#include "tiltmin/optimize.hpp"

namespace tiltmin {

// ---------------------------------------------------------------------------
// Uniqueness certification

/// Verdicts are relative to the sampled y and the numeric tolerances; the tool
/// can refute uniqueness but never prove it.
enum class Verdict { kUniqueOnSamples, kMultipleFound, kInconclusive, kVacuous };
std::string to_string(Verdict v);

using BifunctionalFn = std::function<double(const Vector&, const Vector&)>;

struct UniquenessEntry {
  Vector y;
  double incumbent = 0.0;
  double radius = 0.0;
  MinimizationResult minimization;
  Verdict verdict = Verdict::kInconclusive;
};

struct UniquenessReport {
  std::vector<UniquenessEntry> entries;
  Verdict overall = Verdict::kInconclusive;
  double eps_val = 0.0;
  double delta_sep = 0.0;
  GrowthMethod kappa_method = GrowthMethod::kAnalytic;
  double kappa_hat = 0.0;
  bool kappa_satisfied = false;
  bool radius_override = false;
};

struct CertifyOptions {
  double margin = 1.0;
  /// Explicit truncation radius; bypasses the coercivity derivation.
  std::optional<double> radius_override;
  /// Used when the growth bound fails and no override is given.
  double fallback_radius = 10.0;
  /// Test hook replacing J(x, y) by a planted objective.
  BifunctionalFn planted_objective;
  int jobs = 1;
};

/// The per-y step: incumbent from a short pre-scan, truncation radius, global
/// minimization of J(., y) and a verdict for this y.
UniquenessEntry certify_point(const TiltedFunctional& f, const Vector& y, const GrowthEstimate& growth,
                              const OptimizeConfig& config, const CertifyOptions& options = {});

UniquenessReport certify_uniqueness(const TiltedFunctional& f, const std::vector<Vector>& y_samples,
                                    const GrowthEstimate& growth, const OptimizeConfig& config,
                                    const CertifyOptions& options = {});

// ---------------------------------------------------------------------------
// Fixed points and saddle checks

struct SaddleReport {
  Vector x_star;
  /// Phi(x_star).
  double residual = 0.0;
  /// max over sampled y of J(x_star, y), with its witness.
  double min_check = 0.0;
  Vector min_witness;
  /// min over sampled x at distance >= delta_sep of J(x, x_star).
  double strict_check = 0.0;
  Vector strict_witness;
  /// min over the same x of |x - f(x)| - |x_star - f(x)|.
  double displacement_margin = 0.0;
  /// max over sampled x of J(f(x), x) - Phi(x); non-positive up to rounding.
  double criterion_excess = 0.0;
  int y_samples = 0;
  int x_samples = 0;

  double residual_tol = 1e-6;
  double saddle_tol = 1e-6;
  double criterion_tol = 1e-12;

  bool residual_ok = false;
  bool min_ok = false;
  bool strict_ok = false;
  bool displacement_ok = false;
  bool criterion_ok = false;

  double radius = 0.0;
  MinimizationResult minimization;
  GrowthMethod kappa_method = GrowthMethod::kAnalytic;
  double kappa_hat = 0.0;

  bool passed() const { return residual_ok && min_ok && strict_ok && displacement_ok && criterion_ok; }
  /// Recomputes the pass flags from the stored numbers and tolerances.
  void update_flags();
};

class FixedPointNotLocated : public Error {
 public:
  explicit FixedPointNotLocated(SaddleReport report);
  const SaddleReport& report() const { return report_; }

 private:
  SaddleReport report_;
};

struct FixedPointOptions {
  double margin = 1.0;
  /// Radius of the global sampling ball for the checks (local samples are
  /// drawn around x_star as well).
  double check_radius = 10.0;
  double locate_tol = 1e-4;
  int jobs = 1;
};

/// Minimizes Phi over the coercivity-truncated set and checks the saddle,
/// strict-minimum and fixed-point-criterion properties on seeded samples.
/// Throws PreconditionError when the growth bound fails and
/// FixedPointNotLocated when Phi(x_star) stays above locate_tol.
SaddleReport find_fixed_point(const TiltedFunctional& f, const GrowthEstimate& growth, const OptimizeConfig& config,
                              int check_samples, std::uint64_t seed, const FixedPointOptions& options = {});

struct SaddleCheck {
  double max_value = 0.0;  // max_y J(x_star, y)
  Vector max_witness;
  double min_value = 0.0;  // min_x J(x, x_star) over all sampled x
  double min_far_value = 0.0;  // same, restricted to |x - x_star| >= delta_sep
  Vector min_far_witness;
  bool max_ok = false;       // max_value <= tol
  bool nonnegative_ok = false;  // min_value > -tol
  bool strict_ok = false;    // min_far_value > 0
  bool passed() const { return max_ok && nonnegative_ok && strict_ok; }
};

SaddleCheck verify_saddle(const GenericBifunctional& j, const Vector& x_star, const std::vector<Vector>& y_grid,
                          const std::vector<Vector>& x_grid, double tol, double delta_sep = 1e-3);

// ---------------------------------------------------------------------------
// Minimax gap

struct MinimaxResult {
  double lower = 0.0;  // sup_y inf_x J
  double upper = 0.0;  // inf_x sup_y J
  double gap = 0.0;    // upper - lower
  Vector x_witness;    // argmin of the upper envelope
  Vector y_witness;    // argmax of the lower envelope
  bool x_on_boundary = false;
  bool y_on_boundary = false;
  double witness_distance = 0.0;
  bool witnesses_coincide = false;  // distance <= delta_sep
  bool weak_duality_ok = false;     // lower <= upper + 2 tol
  double tol = 0.0;
};

struct MinimaxOptions {
  double tol = 1e-6;
  double delta_sep = 1e-3;
  double termination_step = 1e-10;
  int jobs = 1;
};

/// Both envelopes by nested grid scans with pattern-search refinement of the
/// inner and outer problems. The inner minimizations of the lower envelope
/// are also started from the upper witness.
MinimaxResult minimax_gap(const GenericBifunctional& j, double radius, int resolution,
                          const MinimaxOptions& options = {});

// ---------------------------------------------------------------------------
// Counterexample sweep

enum class FamilyKind { kScaledIdentity, kRotationScale };
std::string to_string(FamilyKind k);
std::optional<FamilyKind> family_kind_from_string(const std::string& name);

struct ParameterRange {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  std::vector<double> values() const;
  friend bool operator==(const ParameterRange&, const ParameterRange&) = default;
};

/// f(x) = theta * A(phi) x + b, with A(phi) = I or the planar rotation by phi.
struct MapFamilyTemplate {
  FamilyKind kind = FamilyKind::kScaledIdentity;
  int dimension = 2;
  ParameterRange theta;
  ParameterRange phi;
  Vector offset;

  MapSpec instantiate(double theta_value, double phi_value) const;
};

struct YGridSpec {
  int per_axis = 5;
  /// Half-width of the coordinate box the grid spans.
  double extent = 2.0;
};

struct PlantedCell {
  std::size_t cell = 0;
  std::size_t y_index = 0;
  BifunctionalFn objective;
};

struct SweepConfig {
  double margin = 1.0;
  int range_check_samples = 64;
  std::uint64_t seed = 0;
  std::optional<PlantedCell> planted;
  int jobs = 1;
};

struct CounterexampleCandidate {
  std::size_t cell = 0;
  double theta = 0.0;
  double phi = 0.0;
  std::size_t norm_index = 0;
  std::size_t y_index = 0;
  Vector y;
  double radius = 0.0;
  std::vector<Cluster> clusters;
  double value_gap = 0.0;
  double separation = 0.0;
  double score = 0.0;
  bool verified = false;
  std::size_t verified_clusters = 0;
  GrowthMethod kappa_method = GrowthMethod::kAnalytic;
  bool planted = false;
};

struct SweepReport {
  /// Survivors of the refined re-run, ranked by score (descending).
  std::vector<CounterexampleCandidate> candidates;
  /// Coarse findings that did not survive the re-run.
  std::vector<CounterexampleCandidate> rejected;
  std::size_t cells_total = 0;
  std::size_t cells_run = 0;
  std::size_t skipped_range = 0;
  std::size_t skipped_growth = 0;
  std::size_t entries = 0;
  std::size_t vacuous_entries = 0;
  int verify_resolution = 0;
  double verify_eps_val = 0.0;
};

/// Cells enumerate (theta, phi, norm) in that nesting order.
SweepReport search_counterexample(const MapFamilyTemplate& family, const FeasibleSet& set,
                                  const std::vector<NormSpec>& norms, const YGridSpec& y_grid,
                                  const SweepConfig& sweep, const OptimizeConfig& config);

/// Box grid of y values projected into X, duplicates removed, lexicographic order.
std::vector<Vector> box_grid_points(const FeasibleSet& set, double extent, int per_axis);

}  // namespace tiltmin
