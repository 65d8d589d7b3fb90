#pragma once

#include <functional>

#include "tiltmin/maps.hpp"
#include "tiltmin/spaces.hpp"

namespace tiltmin {

/// The bundle (norm, X, f) defining
///   J(x, y) = |x - f(x)| - |y - f(x)|   and   Phi(x) = |x - f(x)|.
class TiltedFunctional {
 public:
  TiltedFunctional(NormSpec norm, FeasibleSet set, MapSpec map);

  const NormSpec& norm_spec() const { return norm_; }
  const FeasibleSet& set() const { return set_; }
  const MapSpec& map() const { return map_; }
  int dimension() const { return norm_.dimension(); }

  friend bool operator==(const TiltedFunctional&, const TiltedFunctional&) = default;

 private:
  NormSpec norm_;
  FeasibleSet set_;
  MapSpec map_;
};

double tilted_value(const TiltedFunctional& f, const Vector& x, const Vector& y);

/// J(x, y) with f(x) already known; skips the membership checks.
double tilted_value_given(const TiltedFunctional& f, const Vector& x, const Vector& fx, const Vector& y);

double displacement(const TiltedFunctional& f, const Vector& x);

/// Radius R beyond which J(., y) provably exceeds best_known_value, given that
/// |f(x)| <= kappa |x| whenever |x| >= r0.
double coercivity_radius(const TiltedFunctional& f, const Vector& y, double kappa, double r0,
                         double best_known_value, double margin = 1.0);

/// An arbitrary real-valued J on X x X, for the saddle and minimax checks.
struct GenericBifunctional {
  std::function<double(const Vector&, const Vector&)> evaluator;
  FeasibleSet domain;
  /// Used for distances between points (witness separation, sampling balls).
  NormSpec norm;
  bool zero_diagonal = false;
  bool concave_in_y = false;

  double operator()(const Vector& x, const Vector& y) const { return evaluator(x, y); }
};

/// Wraps the tilted functional; zero diagonal and concavity in y hold by construction.
GenericBifunctional as_bifunctional(const TiltedFunctional& f);

}  // namespace tiltmin
