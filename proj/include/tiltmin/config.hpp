#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tiltmin/experiments.hpp"

namespace tiltmin {

enum class ExperimentKind { kCertifyUniqueness, kFindFixedPoint, kMinimaxGap, kSearchCounterexample, kVerifySaddle };
std::string to_string(ExperimentKind k);
std::optional<ExperimentKind> experiment_kind_from_string(const std::string& name);

/// Parse or validation failure, tagged with where the offending value came from.
class ConfigError : public InputError {
 public:
  ConfigError(std::string origin, std::string field, const std::string& message);
  const std::string& origin() const { return origin_; }
  const std::string& field() const { return field_; }

 private:
  std::string origin_;
  std::string field_;
};

enum class YSamplingKind { kGrid, kList };

struct YSampling {
  YSamplingKind kind = YSamplingKind::kGrid;
  int per_axis = 5;
  double extent = 2.0;
  std::vector<Vector> points;
};

struct SweepSettings {
  MapFamilyTemplate family;
  std::vector<Exponent> exponents;
  int range_check_samples = 64;
  /// (cell, y_index) receiving the planted two-well objective.
  std::optional<std::pair<std::size_t, std::size_t>> planted;
};

/// Everything that affects results. Execution knobs (job count, output
/// directory) are deliberately not part of it.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kFindFixedPoint;
  std::uint64_t seed = 0;
  int dimension = 1;
  std::optional<Exponent> p;  // unset for sweeps, which carry their own norm list
  Vector weights;             // empty for the plain lp norm
  FeasibleSet set = FeasibleSet::full_space(1);
  std::optional<MapSpec> map;  // unset for sweeps
  SweepSettings sweep;

  OptimizeConfig optimizer;
  std::vector<double> growth_radii = {1e2, 1e3, 1e4};
  int growth_directions = 16;

  double margin = 1.0;
  std::optional<double> radius_override;
  double fallback_radius = 10.0;

  YSampling y;
  int check_samples = 1000;
  double check_radius = 10.0;
  double locate_tol = 1e-4;

  std::optional<Vector> x_star;  // unset means the analytic fixed point
  double saddle_tol = 1e-6;

  double minimax_radius = 8.0;
  int minimax_resolution = 33;
  double minimax_tol = 1e-6;

  NormSpec norm_spec() const;
  std::vector<NormSpec> sweep_norms() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// One `key = value` assignment with its source location.
struct Assignment {
  std::string key;
  std::string value;
  std::string origin;
};

/// Splits `key = value` lines; `#` starts a comment. Throws ConfigError on
/// malformed lines and duplicate keys.
std::vector<Assignment> read_assignments(const std::string& text, const std::string& source);

/// Parses `key=value` from the command line.
Assignment parse_override(const std::string& text);

/// Builds and validates a config. Later assignments replace earlier ones only
/// when they come from overrides.
ExperimentConfig build_config(const std::vector<Assignment>& file, const std::vector<Assignment>& overrides = {});

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const std::vector<Assignment>& overrides = {});

/// Canonical, fully resolved key/value listing in a fixed order.
std::vector<std::pair<std::string, std::string>> serialize_config(const ExperimentConfig& config);

std::string format_double(double v);
std::string format_vector(const Vector& v);
std::string format_matrix(const Matrix& m);

}  // namespace tiltmin
