#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tiltmin/types.hpp"

namespace tiltmin {

/// Exponent of an lp norm. Infinity is a distinguished state, never a float sentinel.
class Exponent {
 public:
  static Exponent finite(double p);
  static Exponent infinity() { return Exponent(true, 0.0); }

  bool is_infinite() const { return infinite_; }
  /// Only meaningful when !is_infinite().
  double value() const { return value_; }

  std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  Exponent(bool infinite, double value) : infinite_(infinite), value_(value) {}

  bool infinite_;
  double value_;
};

enum class NormKind { kLp, kWeightedLp };

/// The norm carried by the ambient space R^n.
class NormSpec {
 public:
  static NormSpec lp(Exponent p, int dimension);
  static NormSpec weighted_lp(Exponent p, Vector weights);

  NormKind kind() const { return kind_; }
  const Exponent& p() const { return p_; }
  /// Empty for kLp.
  const Vector& weights() const { return weights_; }
  int dimension() const { return dimension_; }

  /// Norm of the i-th unit vector.
  double unit_norm(int i) const;

  friend bool operator==(const NormSpec& a, const NormSpec& b) {
    return a.kind_ == b.kind_ && a.p_ == b.p_ && a.dimension_ == b.dimension_ &&
           same_vector(a.weights_, b.weights_);
  }

 private:
  NormSpec(NormKind kind, Exponent p, Vector weights, int dimension)
      : kind_(kind), p_(p), weights_(std::move(weights)), dimension_(dimension) {}

  NormKind kind_;
  Exponent p_;
  Vector weights_;
  int dimension_;
};

double norm(const Vector& v, const NormSpec& spec);

/// Constraint a.x >= c.
struct HalfSpace {
  Vector a;
  double c = 0.0;

  friend bool operator==(const HalfSpace& l, const HalfSpace& r) {
    return l.c == r.c && same_vector(l.a, r.a);
  }
};

/// A point and a direction such that base + t * ray stays in the set for all t >= 0.
struct RayWitness {
  Vector base;
  Vector ray;
};

enum class SetKind { kFullSpace, kOrthant, kHalfSpace, kConeIntersection };

/// Closed convex unbounded subset of R^n. Unboundedness is certified at
/// construction by a stored ray witness.
class FeasibleSet {
 public:
  static FeasibleSet full_space(int dimension);
  static FeasibleSet orthant(Vector lower);
  static FeasibleSet half_space(Vector a, double c);
  /// Throws InputError("set must be unbounded") when no recession direction
  /// exists, DomainError when the intersection is empty.
  static FeasibleSet cone_intersection(std::vector<HalfSpace> constraints,
                                       std::optional<RayWitness> witness = std::nullopt);

  SetKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  /// Orthant lower bounds; empty for other kinds.
  const Vector& lower() const { return lower_; }
  /// Half-space constraints (one for kHalfSpace, several for kConeIntersection).
  const std::vector<HalfSpace>& constraints() const { return constraints_; }
  const RayWitness& witness() const { return witness_; }

  /// Largest constraint violation (0 when feasible).
  double violation(const Vector& x) const;

  friend bool operator==(const FeasibleSet& a, const FeasibleSet& b) {
    return a.kind_ == b.kind_ && a.dimension_ == b.dimension_ && same_vector(a.lower_, b.lower_) &&
           a.constraints_ == b.constraints_;
  }

 private:
  FeasibleSet() = default;

  SetKind kind_ = SetKind::kFullSpace;
  int dimension_ = 0;
  Vector lower_;
  std::vector<HalfSpace> constraints_;
  RayWitness witness_;
};

bool contains(const FeasibleSet& set, const Vector& x, double tol);

/// Euclidean projection onto the set. Cone intersections use Dykstra's
/// alternating projections and throw NonConvergenceError at the iteration cap.
Vector project(const FeasibleSet& set, const Vector& z);

inline constexpr int kProjectionIterationCap = 10000;
inline constexpr double kProjectionResidual = 1e-12;

/// Grid over the coordinate box enclosing {|x| <= R}, pulled into X by projection
/// and filtered back to the ball. Nodes are visited in lexicographic index order.
class SampleDomain {
 public:
  SampleDomain(FeasibleSet set, NormSpec norm, double radius, int resolution);

  const FeasibleSet& set() const { return set_; }
  const NormSpec& norm_spec() const { return norm_; }
  double radius() const { return radius_; }
  int resolution() const { return resolution_; }
  double axis_extent(int axis) const { return extents_[static_cast<std::size_t>(axis)]; }
  /// Coordinate spacing of the grid on the given axis.
  double spacing(int axis) const;
  std::int64_t node_count() const;

  /// Raw node coordinates before projection.
  Vector node(std::int64_t linear_index) const;
  /// Projected node, or nullopt if it falls outside the ball.
  std::optional<Vector> sample(std::int64_t linear_index) const;

  /// Unique feasible samples in first-visit order.
  std::vector<Vector> points() const;

 private:
  FeasibleSet set_;
  NormSpec norm_;
  double radius_;
  int resolution_;
  std::vector<double> extents_;
};

/// Seeded uniform draws from the enclosing box, projected into X and kept
/// when inside the ball. May return fewer than `count` points for thin sets.
std::vector<Vector> random_feasible_points(const FeasibleSet& set, const NormSpec& norm,
                                           double radius, int count, std::uint64_t seed);

/// Randomly shifted Halton points (a low-discrepancy set) inside X and the ball.
std::vector<Vector> halton_feasible_points(const FeasibleSet& set, const NormSpec& norm,
                                           double radius, int count, std::uint64_t seed);

/// Seed mixing for independent streams derived from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace tiltmin
