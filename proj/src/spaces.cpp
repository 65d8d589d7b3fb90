#include "tiltmin/spaces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

namespace tiltmin {

namespace {

void check_dimension(const Vector& v, int n, const char* what) {
  if (v.size() != n) {
    throw InputError(fmt::format("{}: dimension mismatch (got {}, expected {})", what, v.size(), n));
  }
}

// Projection onto {a.x >= c}. The correction is repeated when rounding leaves
// the point marginally infeasible.
Vector project_half_space(const HalfSpace& h, const Vector& z) {
  const double aa = h.a.squaredNorm();
  Vector x = z;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double gap = h.c - h.a.dot(x);
    if (gap <= 0.0) break;
    const double scale = attempt == 0 ? 1.0 : 1.0 + 1e-12 * attempt;
    x += (scale * gap / aa) * h.a;
  }
  return x;
}

double half_space_violation(const std::vector<HalfSpace>& hs, const Vector& x) {
  double worst = 0.0;
  for (const auto& h : hs) worst = std::max(worst, h.c - h.a.dot(x));
  return worst;
}

// Dykstra's algorithm: cyclic projections with correction terms, converging to
// the Euclidean projection onto the intersection.
Vector dykstra(const std::vector<HalfSpace>& hs, const Vector& z) {
  if (half_space_violation(hs, z) <= 0.0) return z;
  const auto m = hs.size();
  std::vector<Vector> corrections(m, Vector::Zero(z.size()));
  Vector x = z;
  for (int iter = 0; iter < kProjectionIterationCap; ++iter) {
    const Vector before = x;
    for (std::size_t i = 0; i < m; ++i) {
      const Vector shifted = x + corrections[i];
      x = project_half_space(hs[i], shifted);
      corrections[i] = shifted - x;
    }
    const double change = (x - before).lpNorm<Eigen::Infinity>();
    const double scale = 1.0 + x.lpNorm<Eigen::Infinity>();
    if (half_space_violation(hs, x) <= kProjectionResidual && change <= 1e-13 * scale) {
      return x;
    }
  }
  // Plain cyclic sweeps until the residual criterion holds.
  for (int iter = 0; iter < 64; ++iter) {
    if (half_space_violation(hs, x) <= kProjectionResidual) return x;
    for (const auto& h : hs) x = project_half_space(h, x);
  }
  if (half_space_violation(hs, x) <= kProjectionResidual) return x;
  throw NonConvergenceError("projection onto cone intersection did not converge", x);
}

std::optional<Vector> find_recession_ray(const std::vector<HalfSpace>& hs, int n) {
  std::vector<HalfSpace> cone;
  cone.reserve(hs.size());
  for (const auto& h : hs) cone.push_back({h.a, 0.0});

  std::vector<Vector> candidates;
  Vector sum = Vector::Zero(n);
  for (const auto& h : hs) sum += h.a / h.a.norm();
  candidates.push_back(sum);
  for (const auto& h : hs) candidates.push_back(h.a);
  for (int i = 0; i < n; ++i) {
    candidates.push_back(Vector::Unit(n, i));
    candidates.push_back(-Vector::Unit(n, i));
  }
  for (const auto& d : candidates) {
    const double len = d.norm();
    if (!(len > 0.0)) continue;
    Vector r;
    try {
      r = dykstra(cone, d / len);
    } catch (const NonConvergenceError& e) {
      r = e.last_iterate();
    }
    const double rn = r.norm();
    if (rn < 1e-6) continue;
    r /= rn;
    bool ok = true;
    for (const auto& h : hs) ok = ok && h.a.dot(r) >= -1e-14 * h.a.norm();
    if (ok) return r;
  }
  return std::nullopt;
}

// Radical inverse of `index` in the given prime base.
double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

constexpr std::array<unsigned, 12> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

std::vector<double> box_extents(const NormSpec& norm, double radius) {
  std::vector<double> ext(static_cast<std::size_t>(norm.dimension()));
  for (int i = 0; i < norm.dimension(); ++i) ext[static_cast<std::size_t>(i)] = radius / norm.unit_norm(i);
  return ext;
}

}  // namespace

// ---------------------------------------------------------------------------
// Norms

Exponent Exponent::finite(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw InputError(fmt::format("norm exponent must be a finite value >= 1 (got {})", p));
  }
  return Exponent(false, p);
}

std::string Exponent::to_string() const {
  return infinite_ ? std::string("inf") : fmt::format("{:.17g}", value_);
}

NormSpec NormSpec::lp(Exponent p, int dimension) {
  if (dimension < 1) throw InputError("norm dimension must be >= 1");
  return NormSpec(NormKind::kLp, p, Vector(), dimension);
}

NormSpec NormSpec::weighted_lp(Exponent p, Vector weights) {
  if (weights.size() < 1) throw InputError("norm dimension must be >= 1");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw InputError("norm weights must be positive and finite");
    }
  }
  const int n = static_cast<int>(weights.size());
  return NormSpec(NormKind::kWeightedLp, p, std::move(weights), n);
}

double NormSpec::unit_norm(int i) const {
  if (kind_ == NormKind::kLp) return 1.0;
  const double w = weights_[i];
  if (p_.is_infinite()) return w;
  return std::pow(w, 1.0 / p_.value());
}

double norm(const Vector& v, const NormSpec& spec) {
  check_dimension(v, spec.dimension(), "norm");
  const bool weighted = spec.kind() == NormKind::kWeightedLp;
  const auto n = v.size();
  auto weight = [&](Eigen::Index i) { return weighted ? spec.weights()[i] : 1.0; };

  if (spec.p().is_infinite()) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) m = std::max(m, weight(i) * std::abs(v[i]));
    return m;
  }
  const double p = spec.p().value();
  if (p == 1.0) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += weight(i) * std::abs(v[i]);
    return s;
  }
  double m = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  if (p == 2.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = v[i] / m;
      s += weight(i) * t * t;
    }
    return m * std::sqrt(s);
  }
  for (Eigen::Index i = 0; i < n; ++i) s += weight(i) * std::pow(std::abs(v[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Feasible sets

FeasibleSet FeasibleSet::full_space(int dimension) {
  if (dimension < 1) throw InputError("set dimension must be >= 1");
  FeasibleSet s;
  s.kind_ = SetKind::kFullSpace;
  s.dimension_ = dimension;
  s.witness_ = {Vector::Zero(dimension), Vector::Unit(dimension, 0)};
  return s;
}

FeasibleSet FeasibleSet::orthant(Vector lower) {
  if (lower.size() < 1) throw InputError("set dimension must be >= 1");
  if (!lower.allFinite()) throw InputError("orthant lower bounds must be finite");
  FeasibleSet s;
  s.kind_ = SetKind::kOrthant;
  s.dimension_ = static_cast<int>(lower.size());
  s.witness_ = {lower, Vector::Ones(lower.size()) / std::sqrt(static_cast<double>(lower.size()))};
  s.lower_ = std::move(lower);
  return s;
}

FeasibleSet FeasibleSet::half_space(Vector a, double c) {
  if (a.size() < 1) throw InputError("set dimension must be >= 1");
  if (!(a.norm() > 0.0) || !a.allFinite() || !std::isfinite(c)) {
    throw InputError("half-space normal must be non-zero and finite");
  }
  FeasibleSet s;
  s.kind_ = SetKind::kHalfSpace;
  s.dimension_ = static_cast<int>(a.size());
  HalfSpace h{std::move(a), c};
  s.witness_ = {project_half_space(h, Vector::Zero(s.dimension_)), h.a / h.a.norm()};
  s.constraints_.push_back(std::move(h));
  return s;
}

FeasibleSet FeasibleSet::cone_intersection(std::vector<HalfSpace> constraints,
                                           std::optional<RayWitness> witness) {
  if (constraints.empty()) throw InputError("cone intersection needs at least one constraint");
  const auto n = constraints.front().a.size();
  if (n < 1) throw InputError("set dimension must be >= 1");
  for (const auto& h : constraints) {
    if (h.a.size() != n) throw InputError("cone intersection: constraint dimensions disagree");
    if (!(h.a.norm() > 0.0) || !h.a.allFinite() || !std::isfinite(h.c)) {
      throw InputError("half-space normal must be non-zero and finite");
    }
  }
  FeasibleSet s;
  s.kind_ = SetKind::kConeIntersection;
  s.dimension_ = static_cast<int>(n);
  s.constraints_ = std::move(constraints);

  if (witness) {
    check_dimension(witness->base, s.dimension_, "ray witness base");
    check_dimension(witness->ray, s.dimension_, "ray witness direction");
    if (!(witness->ray.norm() > 0.0)) throw InputError("set must be unbounded: zero ray witness");
    if (s.violation(witness->base) > 1e-9) throw InputError("ray witness base is not in the set");
    for (const auto& h : s.constraints_) {
      if (h.a.dot(witness->ray) < -1e-12 * h.a.norm() * witness->ray.norm()) {
        throw InputError("set must be unbounded: ray witness leaves the set");
      }
    }
    s.witness_ = *witness;
    return s;
  }

  auto ray = find_recession_ray(s.constraints_, s.dimension_);
  if (!ray) throw InputError("set must be unbounded");
  Vector base;
  try {
    base = dykstra(s.constraints_, Vector::Zero(s.dimension_));
  } catch (const NonConvergenceError&) {
    throw DomainError("cone intersection appears to be empty");
  }
  s.witness_ = {std::move(base), std::move(*ray)};
  return s;
}

double FeasibleSet::violation(const Vector& x) const {
  check_dimension(x, dimension_, "feasible set");
  switch (kind_) {
    case SetKind::kFullSpace:
      return 0.0;
    case SetKind::kOrthant:
      return std::max(0.0, (lower_ - x).maxCoeff());
    case SetKind::kHalfSpace:
    case SetKind::kConeIntersection:
      return half_space_violation(constraints_, x);
  }
  return 0.0;
}

bool contains(const FeasibleSet& set, const Vector& x, double tol) {
  return set.violation(x) <= tol;
}

Vector project(const FeasibleSet& set, const Vector& z) {
  check_dimension(z, set.dimension(), "project");
  switch (set.kind()) {
    case SetKind::kFullSpace:
      return z;
    case SetKind::kOrthant:
      return z.cwiseMax(set.lower());
    case SetKind::kHalfSpace:
      return project_half_space(set.constraints().front(), z);
    case SetKind::kConeIntersection:
      return dykstra(set.constraints(), z);
  }
  return z;
}

// ---------------------------------------------------------------------------
// Sampling

SampleDomain::SampleDomain(FeasibleSet set, NormSpec norm, double radius, int resolution)
    : set_(std::move(set)), norm_(std::move(norm)), radius_(radius), resolution_(resolution) {
  if (set_.dimension() != norm_.dimension()) throw InputError("sample domain: set and norm dimensions disagree");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("sample domain: radius must be positive");
  if (resolution < 1) throw InputError("sample domain: resolution must be >= 1");
  extents_ = box_extents(norm_, radius_);
}

double SampleDomain::spacing(int axis) const {
  if (resolution_ < 2) return 2.0 * axis_extent(axis);
  return 2.0 * axis_extent(axis) / (resolution_ - 1);
}

std::int64_t SampleDomain::node_count() const {
  std::int64_t count = 1;
  for (int i = 0; i < set_.dimension(); ++i) count *= resolution_;
  return count;
}

Vector SampleDomain::node(std::int64_t linear_index) const {
  const int n = set_.dimension();
  Vector x(n);
  const double denom = resolution_ > 1 ? static_cast<double>(resolution_ - 1) : 1.0;
  for (int axis = n - 1; axis >= 0; --axis) {
    const auto k = linear_index % resolution_;
    linear_index /= resolution_;
    const double unit = resolution_ > 1 ? static_cast<double>(2 * k - (resolution_ - 1)) / denom : 0.0;
    x[axis] = extents_[static_cast<std::size_t>(axis)] * unit;
  }
  return x;
}

std::optional<Vector> SampleDomain::sample(std::int64_t linear_index) const {
  Vector x = node(linear_index);
  if (set_.violation(x) > 0.0) x = project(set_, x);
  if (norm(x, norm_) > radius_) return std::nullopt;
  return x;
}

std::vector<Vector> SampleDomain::points() const {
  std::vector<Vector> out;
  std::set<std::vector<double>> seen;
  const auto total = node_count();
  for (std::int64_t i = 0; i < total; ++i) {
    auto x = sample(i);
    if (!x) continue;
    if (!seen.emplace(x->data(), x->data() + x->size()).second) continue;
    out.push_back(std::move(*x));
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<Vector> random_feasible_points(const FeasibleSet& set, const NormSpec& norm_spec,
                                           double radius, int count, std::uint64_t seed) {
  if (set.dimension() != norm_spec.dimension()) throw InputError("sampling: set and norm dimensions disagree");
  const int n = set.dimension();
  const auto ext = box_extents(norm_spec, radius);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  const int max_draws = 50 * std::max(count, 1);
  for (int draw = 0; draw < max_draws && static_cast<int>(out.size()) < count; ++draw) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = ext[static_cast<std::size_t>(i)] * unit(rng);
    if (set.violation(x) > 0.0) x = project(set, x);
    if (norm(x, norm_spec) <= radius) out.push_back(std::move(x));
  }
  return out;
}

std::vector<Vector> halton_feasible_points(const FeasibleSet& set, const NormSpec& norm_spec,
                                           double radius, int count, std::uint64_t seed) {
  if (set.dimension() != norm_spec.dimension()) throw InputError("sampling: set and norm dimensions disagree");
  const int n = set.dimension();
  if (n > static_cast<int>(kPrimes.size())) throw InputError("halton sampling supports at most 12 dimensions");
  const auto ext = box_extents(norm_spec, radius);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(static_cast<std::size_t>(n));
  for (auto& s : shift) s = unit(rng);

  std::vector<Vector> out;
  std::map<std::vector<double>, bool> seen;
  const std::uint64_t max_index = 50ull * static_cast<std::uint64_t>(std::max(count, 1));
  for (std::uint64_t k = 1; k <= max_index && static_cast<int>(out.size()) < count; ++k) {
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      double u = radical_inverse(k, kPrimes[static_cast<std::size_t>(i)]) + shift[static_cast<std::size_t>(i)];
      u -= std::floor(u);
      x[i] = ext[static_cast<std::size_t>(i)] * (2.0 * u - 1.0);
    }
    if (set.violation(x) > 0.0) x = project(set, x);
    if (norm(x, norm_spec) > radius) continue;
    std::vector<double> key(x.data(), x.data() + x.size());
    if (!seen.emplace(std::move(key), true).second) continue;
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace tiltmin
