#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tiltmin/spaces.hpp"
#include "tiltmin/types.hpp"

namespace tiltmin {

enum class MapFamily { kAffine, kConstant, kAffinePlusBounded, kComposedWithProjection };

/// Fixed catalog of coordinate-wise bounded smooth fields; each component is
/// bounded by the amplitude rho.
enum class Perturbation {
  kSine,         // rho * sin(x_i)
  kTanh,         // rho * tanh(x_i)
  kCosineShift,  // rho * cos(x_{i+1 mod n})
  kGaussianBump  // rho * exp(-x_i^2)
};

std::string to_string(Perturbation p);
std::optional<Perturbation> perturbation_from_string(const std::string& name);

/// A parameterized self-map of the feasible set.
class MapSpec {
 public:
  static MapSpec affine(Matrix a, Vector b);
  static MapSpec constant(Vector c);
  static MapSpec affine_plus_bounded(Matrix a, Vector b, Perturbation field, double rho);
  static MapSpec composed_with_projection(MapSpec inner);

  MapFamily family() const { return family_; }
  int dimension() const { return dimension_; }
  /// Linear part (affine families).
  const Matrix& matrix() const { return a_; }
  /// b for affine families, c for constant maps.
  const Vector& offset() const { return b_; }
  Perturbation perturbation() const { return field_; }
  double amplitude() const { return rho_; }
  /// Only valid for kComposedWithProjection.
  const MapSpec& inner() const { return *inner_; }

  /// f(x) without membership checks; projection is applied for the composed family.
  Vector raw(const Vector& x, const FeasibleSet& set) const;

  friend bool operator==(const MapSpec& l, const MapSpec& r);

 private:
  MapSpec() = default;

  MapFamily family_ = MapFamily::kConstant;
  int dimension_ = 0;
  Matrix a_;
  Vector b_;
  Perturbation field_ = Perturbation::kSine;
  double rho_ = 0.0;
  std::shared_ptr<const MapSpec> inner_;
};

inline constexpr double kMembershipTol = 1e-9;

/// f(x) with domain and range checks.
/// Throws InputError when x is outside X and RangeViolationError when f(x) is.
Vector evaluate(const MapSpec& map, const Vector& x, const FeasibleSet& set);

enum class GrowthMethod { kAnalytic, kSampled };
std::string to_string(GrowthMethod m);

/// Estimate of limsup |f(x)|/|x|. `offset` bounds |f(x)| - kappa_hat*|x| (exact
/// for analytic estimates, a sample maximum otherwise).
struct GrowthEstimate {
  double kappa_hat = 0.0;
  GrowthMethod method = GrowthMethod::kAnalytic;
  std::vector<double> radii;
  bool satisfied = false;
  double offset = 0.0;
};

/// kappa valid for every |x| >= r0, derived from a GrowthEstimate by splitting
/// the slack between kappa_hat and 1/2.
struct GrowthBound {
  double kappa = 0.0;
  double r0 = 0.0;
};

/// Throws PreconditionError when the estimate does not satisfy kappa_hat < 1/2.
GrowthBound conditional_bound(const GrowthEstimate& estimate);

/// Operator norm of A induced by the norm. Closed form for p = 1 and p = inf,
/// power iteration for p = 2; nullopt for other exponents.
std::optional<double> operator_norm(const Matrix& a, const NormSpec& norm);

/// Largest singular value by power iteration on A^T A.
double spectral_norm(const Matrix& a);

GrowthEstimate growth_coefficient(const MapSpec& map, const NormSpec& norm, const FeasibleSet& set,
                                  const std::vector<double>& radii, int directions_per_radius,
                                  std::uint64_t seed);

struct FixedPointOracle {
  std::optional<Vector> point;
  std::string note;
};

/// Closed-form fixed point for affine and constant maps.
FixedPointOracle analytic_fixed_point(const MapSpec& map);

/// Solves m x = rhs by Gaussian elimination with partial pivoting; nullopt when
/// m is singular to working precision.
std::optional<Vector> solve_linear(Matrix m, Vector rhs);

}  // namespace tiltmin
