#include "tiltmin/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

namespace tiltmin {

namespace {

void check_square(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols()) throw InputError("map matrix must be square");
  if (a.rows() != b.size()) throw InputError("map matrix and offset dimensions disagree");
  if (a.rows() < 1) throw InputError("map dimension must be >= 1");
  if (!a.allFinite() || !b.allFinite()) throw InputError("map parameters must be finite");
}

Vector apply_field(Perturbation field, double rho, const Vector& x) {
  const auto n = x.size();
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (field) {
      case Perturbation::kSine:
        out[i] = std::sin(x[i]);
        break;
      case Perturbation::kTanh:
        out[i] = std::tanh(x[i]);
        break;
      case Perturbation::kCosineShift:
        out[i] = std::cos(x[(i + 1) % n]);
        break;
      case Perturbation::kGaussianBump:
        out[i] = std::exp(-x[i] * x[i]);
        break;
    }
  }
  return rho * out;
}

// D such that |v|_w = |D v|_p for the weighted lp norms.
Vector weight_scaling(const NormSpec& norm) {
  const int n = norm.dimension();
  Vector d(n);
  for (int i = 0; i < n; ++i) d[i] = norm.unit_norm(i);
  return d;
}

}  // namespace

std::string to_string(Perturbation p) {
  switch (p) {
    case Perturbation::kSine:
      return "sine";
    case Perturbation::kTanh:
      return "tanh";
    case Perturbation::kCosineShift:
      return "cosine_shift";
    case Perturbation::kGaussianBump:
      return "gaussian_bump";
  }
  return "sine";
}

std::optional<Perturbation> perturbation_from_string(const std::string& name) {
  for (auto p : {Perturbation::kSine, Perturbation::kTanh, Perturbation::kCosineShift,
                 Perturbation::kGaussianBump}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::string to_string(GrowthMethod m) { return m == GrowthMethod::kAnalytic ? "ANALYTIC" : "SAMPLED"; }

MapSpec MapSpec::affine(Matrix a, Vector b) {
  check_square(a, b);
  MapSpec m;
  m.family_ = MapFamily::kAffine;
  m.dimension_ = static_cast<int>(b.size());
  m.a_ = std::move(a);
  m.b_ = std::move(b);
  return m;
}

MapSpec MapSpec::constant(Vector c) {
  if (c.size() < 1) throw InputError("map dimension must be >= 1");
  if (!c.allFinite()) throw InputError("map parameters must be finite");
  MapSpec m;
  m.family_ = MapFamily::kConstant;
  m.dimension_ = static_cast<int>(c.size());
  m.b_ = std::move(c);
  return m;
}

MapSpec MapSpec::affine_plus_bounded(Matrix a, Vector b, Perturbation field, double rho) {
  check_square(a, b);
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InputError("perturbation amplitude must be >= 0");
  MapSpec m;
  m.family_ = MapFamily::kAffinePlusBounded;
  m.dimension_ = static_cast<int>(b.size());
  m.a_ = std::move(a);
  m.b_ = std::move(b);
  m.field_ = field;
  m.rho_ = rho;
  return m;
}

MapSpec MapSpec::composed_with_projection(MapSpec inner) {
  MapSpec m;
  m.family_ = MapFamily::kComposedWithProjection;
  m.dimension_ = inner.dimension();
  m.inner_ = std::make_shared<const MapSpec>(std::move(inner));
  return m;
}

bool operator==(const MapSpec& l, const MapSpec& r) {
  if (l.family_ != r.family_ || l.dimension_ != r.dimension_) return false;
  switch (l.family_) {
    case MapFamily::kAffine:
      return same_matrix(l.a_, r.a_) && same_vector(l.b_, r.b_);
    case MapFamily::kConstant:
      return same_vector(l.b_, r.b_);
    case MapFamily::kAffinePlusBounded:
      return same_matrix(l.a_, r.a_) && same_vector(l.b_, r.b_) && l.field_ == r.field_ && l.rho_ == r.rho_;
    case MapFamily::kComposedWithProjection:
      return *l.inner_ == *r.inner_;
  }
  return false;
}

Vector MapSpec::raw(const Vector& x, const FeasibleSet& set) const {
  if (x.size() != dimension_) {
    throw InputError(fmt::format("map: dimension mismatch (got {}, expected {})", x.size(), dimension_));
  }
  switch (family_) {
    case MapFamily::kAffine:
      return a_ * x + b_;
    case MapFamily::kConstant:
      return b_;
    case MapFamily::kAffinePlusBounded:
      return a_ * x + b_ + apply_field(field_, rho_, x);
    case MapFamily::kComposedWithProjection:
      return project(set, inner_->raw(x, set));
  }
  return x;
}

Vector evaluate(const MapSpec& map, const Vector& x, const FeasibleSet& set) {
  if (set.dimension() != map.dimension()) throw InputError("map and set dimensions disagree");
  if (set.violation(x) > kMembershipTol) throw InputError("map argument lies outside the feasible set");
  Vector fx = map.raw(x, set);
  if (map.family() != MapFamily::kComposedWithProjection && set.violation(fx) > kMembershipTol) {
    throw RangeViolationError(
        fmt::format("map value leaves the feasible set (violation {:.3g})", set.violation(fx)));
  }
  return fx;
}

double spectral_norm(const Matrix& a) {
  const Matrix c = a.transpose() * a;
  const auto n = c.rows();
  std::vector<Vector> starts;
  Vector mixed(n);
  for (Eigen::Index i = 0; i < n; ++i) mixed[i] = 1.0 + 0.1 * static_cast<double>(i);
  starts.push_back(mixed);
  for (Eigen::Index i = 0; i < n; ++i) starts.push_back(Vector::Unit(n, i));

  double best = 0.0;
  for (const auto& start : starts) {
    Vector v = start.normalized();
    double lambda = v.dot(c * v);
    for (int it = 0; it < 100000; ++it) {
      Vector w = c * v;
      const double wn = w.norm();
      if (wn == 0.0) {
        lambda = 0.0;
        break;
      }
      v = w / wn;
      const double next = v.dot(c * v);
      const bool done = std::abs(next - lambda) <= 1e-13 * std::max(next, 1e-300);
      lambda = next;
      if (done) break;
    }
    best = std::max(best, lambda);
  }
  return std::sqrt(best);
}

std::optional<double> operator_norm(const Matrix& a, const NormSpec& norm) {
  if (a.rows() != norm.dimension() || a.cols() != norm.dimension()) {
    throw InputError("operator norm: matrix and norm dimensions disagree");
  }
  const Vector d = weight_scaling(norm);
  const Matrix scaled = d.asDiagonal() * a * d.cwiseInverse().asDiagonal();
  if (norm.p().is_infinite()) return scaled.cwiseAbs().rowwise().sum().maxCoeff();
  if (norm.p().value() == 1.0) return scaled.cwiseAbs().colwise().sum().maxCoeff();
  if (norm.p().value() == 2.0) return spectral_norm(scaled);
  return std::nullopt;
}

GrowthBound conditional_bound(const GrowthEstimate& estimate) {
  if (!estimate.satisfied || !(estimate.kappa_hat < 0.5)) {
    throw PreconditionError("growth bound not satisfied: kappa_hat must be below 1/2");
  }
  GrowthBound bound;
  bound.kappa = 0.5 * (estimate.kappa_hat + 0.5);
  bound.r0 = std::max(0.0, estimate.offset) / (bound.kappa - estimate.kappa_hat);
  return bound;
}

GrowthEstimate growth_coefficient(const MapSpec& map, const NormSpec& norm_spec, const FeasibleSet& set,
                                  const std::vector<double>& radii, int directions_per_radius,
                                  std::uint64_t seed) {
  if (radii.empty()) throw InputError("growth coefficient: radii must be non-empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw InputError("growth coefficient: radii must be positive and increasing");
    }
  }
  if (map.dimension() != norm_spec.dimension() || map.dimension() != set.dimension()) {
    throw InputError("growth coefficient: dimensions disagree");
  }

  GrowthEstimate est;
  est.radii = radii;

  if (map.family() == MapFamily::kConstant) {
    est.method = GrowthMethod::kAnalytic;
    est.kappa_hat = 0.0;
    est.offset = norm(map.offset(), norm_spec);
    est.satisfied = true;
    return est;
  }
  if (map.family() == MapFamily::kAffine) {
    if (auto op = operator_norm(map.matrix(), norm_spec)) {
      est.method = GrowthMethod::kAnalytic;
      est.kappa_hat = *op;
      est.offset = norm(map.offset(), norm_spec);
      est.satisfied = est.kappa_hat < 0.5;
      return est;
    }
  }

  if (radii.back() < 1e2) throw InputError("growth coefficient: sampled estimates need a largest radius >= 100");
  if (directions_per_radius < 1) throw InputError("growth coefficient: directions_per_radius must be >= 1");

  est.method = GrowthMethod::kSampled;
  const int n = map.dimension();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  struct Sample {
    double x_norm;
    double fx_norm;
  };
  std::vector<Sample> samples;
  double kappa = -1.0;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const bool outer = r + 1 == radii.size();
    for (int k = 0; k < directions_per_radius; ++k) {
      Vector u(n);
      for (int i = 0; i < n; ++i) u[i] = gauss(rng);
      const double un = norm(u, norm_spec);
      if (un == 0.0) continue;
      Vector x = project(set, (radii[r] / un) * u);
      const double xn = norm(x, norm_spec);
      // points pulled far inside the shell by the projection do not probe the tail
      if (xn < 0.5 * radii[r]) continue;
      const double fn = norm(evaluate(map, x, set), norm_spec);
      samples.push_back({xn, fn});
      if (outer) kappa = std::max(kappa, fn / xn);
    }
  }
  if (kappa < 0.0) throw DomainError("growth coefficient: no feasible samples on the outer shell");

  const Vector& base = set.witness().base;
  const double base_fn = norm(evaluate(map, base, set), norm_spec);
  double offset = std::max(0.0, base_fn - kappa * norm(base, norm_spec));
  for (const auto& s : samples) offset = std::max(offset, s.fx_norm - kappa * s.x_norm);

  est.kappa_hat = kappa;
  est.offset = offset;
  est.satisfied = kappa < 0.5;
  return est;
}

std::optional<Vector> solve_linear(Matrix m, Vector rhs) {
  const auto n = m.rows();
  if (m.cols() != n || rhs.size() != n) throw InputError("solve_linear: dimension mismatch");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double tiny = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    }
    if (std::abs(m(pivot, col)) <= tiny) return std::nullopt;
    if (pivot != col) {
      m.row(pivot).swap(m.row(col));
      std::swap(rhs[pivot], rhs[col]);
    }
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double factor = m(r, col) / m(col, col);
      if (factor == 0.0) continue;
      m.row(r).tail(n - col) -= factor * m.row(col).tail(n - col);
      rhs[r] -= factor * rhs[col];
    }
  }
  Vector x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (Eigen::Index c = r + 1; c < n; ++c) s -= m(r, c) * x[c];
    x[r] = s / m(r, r);
  }
  return x;
}

FixedPointOracle analytic_fixed_point(const MapSpec& map) {
  switch (map.family()) {
    case MapFamily::kConstant:
      return {map.offset(), "constant map"};
    case MapFamily::kAffine: {
      const auto n = map.dimension();
      Matrix m = Matrix::Identity(n, n) - map.matrix();
      auto x = solve_linear(std::move(m), map.offset());
      if (!x) return {std::nullopt, "I - A is singular"};
      return {std::move(*x), "solved (I - A) x = b"};
    }
    case MapFamily::kAffinePlusBounded:
    case MapFamily::kComposedWithProjection:
      break;
  }
  return {std::nullopt, "no closed form for this family"};
}

}  // namespace tiltmin
