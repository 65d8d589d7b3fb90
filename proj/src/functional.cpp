#include "tiltmin/functional.hpp"

#include <algorithm>
#include <cmath>

namespace tiltmin {

TiltedFunctional::TiltedFunctional(NormSpec norm, FeasibleSet set, MapSpec map)
    : norm_(std::move(norm)), set_(std::move(set)), map_(std::move(map)) {
  if (norm_.dimension() != set_.dimension() || norm_.dimension() != map_.dimension()) {
    throw InputError("tilted functional: norm, set and map dimensions disagree");
  }
}

double tilted_value_given(const TiltedFunctional& f, const Vector& x, const Vector& fx, const Vector& y) {
  // Both terms share the same expression shape so that J(x, x) is exactly 0.
  return norm(x - fx, f.norm_spec()) - norm(y - fx, f.norm_spec());
}

double tilted_value(const TiltedFunctional& f, const Vector& x, const Vector& y) {
  if (f.set().violation(y) > kMembershipTol) throw InputError("tilted value: y lies outside the feasible set");
  const Vector fx = evaluate(f.map(), x, f.set());
  return tilted_value_given(f, x, fx, y);
}

double displacement(const TiltedFunctional& f, const Vector& x) {
  const Vector fx = evaluate(f.map(), x, f.set());
  return norm(x - fx, f.norm_spec());
}

double coercivity_radius(const TiltedFunctional& f, const Vector& y, double kappa, double r0,
                         double best_known_value, double margin) {
  if (!(kappa >= 0.0) || !(kappa < 0.5)) {
    throw PreconditionError("coercivity radius needs a growth bound kappa in [0, 1/2)");
  }
  if (!(margin > 0.0)) throw InputError("coercivity radius: margin must be positive");
  if (!(r0 >= 0.0)) throw InputError("coercivity radius: r0 must be non-negative");
  const double y_norm = norm(y, f.norm_spec());
  return std::max(r0, (y_norm + best_known_value + margin) / (1.0 - 2.0 * kappa));
}

GenericBifunctional as_bifunctional(const TiltedFunctional& f) {
  return GenericBifunctional{[f](const Vector& x, const Vector& y) { return tilted_value(f, x, y); },
                             f.set(), f.norm_spec(), /*zero_diagonal=*/true, /*concave_in_y=*/true};
}

}  // namespace tiltmin
