#include "tiltmin/config.hpp"

#include <charconv>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace tiltmin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> to_integer(const std::string& s) {
  Int v = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) return std::nullopt;
  return v;
}

const std::vector<std::pair<ExperimentKind, const char*>> kKinds = {
    {ExperimentKind::kCertifyUniqueness, "CERTIFY_UNIQUENESS"},
    {ExperimentKind::kFindFixedPoint, "FIND_FIXED_POINT"},
    {ExperimentKind::kMinimaxGap, "MINIMAX_GAP"},
    {ExperimentKind::kSearchCounterexample, "SEARCH_COUNTEREXAMPLE"},
    {ExperimentKind::kVerifySaddle, "VERIFY_SADDLE"},
};

// Typed access to the merged assignments; tracks which keys were consumed.
class Reader {
 public:
  explicit Reader(std::map<std::string, Assignment> entries) : entries_(std::move(entries)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const auto it = entries_.find(key);
    throw ConfigError(it == entries_.end() ? "config" : it->second.origin, key, message);
  }

  std::optional<std::string> take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    used_.insert(key);
    return trim(it->second.value);
  }

  std::string required(const std::string& key) {
    auto v = take(key);
    if (!v) throw ConfigError("config", key, "required key is missing");
    return *v;
  }

  double number(const std::string& key, const std::string& text) const {
    const auto v = to_double(text);
    if (!v) fail(key, fmt::format("expected a number, got '{}'", text));
    return *v;
  }

  double number(const std::string& key, double fallback) {
    const auto t = take(key);
    return t ? number(key, *t) : fallback;
  }

  double positive(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) fail(key, "expected a positive finite number");
    return v;
  }

  template <typename Int>
  Int integer(const std::string& key, const std::string& text) const {
    const auto v = to_integer<Int>(text);
    if (!v) fail(key, fmt::format("expected an integer, got '{}'", text));
    return *v;
  }

  template <typename Int>
  Int integer(const std::string& key, Int fallback) {
    const auto t = take(key);
    return t ? integer<Int>(key, *t) : fallback;
  }

  int count(const std::string& key, int fallback, int minimum) {
    const int v = integer<int>(key, fallback);
    if (v < minimum) fail(key, fmt::format("must be >= {}", minimum));
    return v;
  }

  Vector vector(const std::string& key, const std::string& text, int expected) const {
    const auto toks = split_ws(text);
    if (expected >= 0 && static_cast<int>(toks.size()) != expected) {
      fail(key, fmt::format("expected {} components, got {}", expected, toks.size()));
    }
    Vector v(static_cast<Eigen::Index>(toks.size()));
    for (std::size_t i = 0; i < toks.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(key, toks[i]);
    return v;
  }

  Vector vector(const std::string& key, int expected) { return vector(key, required(key), expected); }

  Matrix matrix(const std::string& key, int rows, int cols) {
    const std::string text = required(key);
    static const std::regex shape(R"(^\[\s*(\d+)\s*x\s*(\d+)\s*\](.*)$)");
    std::smatch m;
    if (!std::regex_match(text, m, shape)) fail(key, "expected a matrix written as '[RxC] a11 a12 ...' (row-major)");
    const int r = std::stoi(m[1]);
    const int c = std::stoi(m[2]);
    if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols)) {
      fail(key, fmt::format("declared shape {}x{} but {}x{} is required", r, c, rows >= 0 ? rows : r,
                            cols >= 0 ? cols : c));
    }
    const Vector flat = vector(key, m[3].str(), r * c);
    Matrix out(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) out(i, j) = flat[i * c + j];
    }
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto t = take(key);
    if (!t) return fallback;
    if (*t == "true") return true;
    if (*t == "false") return false;
    fail(key, "expected true or false");
  }

  Exponent exponent(const std::string& key, const std::string& text) const {
    if (text == "inf") return Exponent::infinity();
    try {
      return Exponent::finite(number(key, text));
    } catch (const ConfigError&) {
      throw;
    } catch (const InputError& e) {
      fail(key, e.what());
    }
  }

  void finish() const {
    for (const auto& [key, a] : entries_) {
      if (!used_.count(key)) throw ConfigError(a.origin, key, "unknown key, or not used by this configuration");
    }
  }

 private:
  std::map<std::string, Assignment> entries_;
  std::set<std::string> used_;
};

FeasibleSet read_set(Reader& in, int n) {
  const std::string kind = in.required("set.kind");
  try {
    if (kind == "full_space") return FeasibleSet::full_space(n);
    if (kind == "orthant") return FeasibleSet::orthant(in.vector("set.lower", n));
    if (kind == "half_space") {
      const Vector a = in.vector("set.normal", n);
      return FeasibleSet::half_space(a, in.number("set.offset", in.required("set.offset")));
    }
    if (kind == "cone_intersection") {
      const Matrix normals = in.matrix("set.normals", -1, n);
      const Vector offsets = in.vector("set.offsets", static_cast<int>(normals.rows()));
      std::vector<HalfSpace> hs;
      for (Eigen::Index i = 0; i < normals.rows(); ++i) hs.push_back({normals.row(i).transpose(), offsets[i]});
      return FeasibleSet::cone_intersection(std::move(hs));
    }
    if (kind == "box") {
      in.take("set.lower");
      in.take("set.upper");
      in.fail("set.kind", "set must be unbounded");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    in.fail("set.kind", e.what());
  }
  in.fail("set.kind", "expected full_space, orthant, half_space or cone_intersection");
}

MapSpec read_map(Reader& in, int n) {
  const std::string family = in.required("map.family");
  std::optional<MapSpec> map;
  try {
    if (family == "affine") {
      const Matrix a = in.matrix("map.a", n, n);
      map = MapSpec::affine(a, in.vector("map.b", n));
    } else if (family == "constant") {
      map = MapSpec::constant(in.vector("map.c", n));
    } else if (family == "affine_plus_bounded") {
      const Matrix a = in.matrix("map.a", n, n);
      const Vector b = in.vector("map.b", n);
      const std::string name = in.required("map.perturbation");
      const auto field = perturbation_from_string(name);
      if (!field) in.fail("map.perturbation", fmt::format("unknown perturbation '{}'", name));
      map = MapSpec::affine_plus_bounded(a, b, *field, in.number("map.amplitude", in.required("map.amplitude")));
    } else {
      in.fail("map.family", "expected affine, constant or affine_plus_bounded");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    in.fail("map.family", e.what());
  }
  if (in.boolean("map.project", false)) map = MapSpec::composed_with_projection(*map);
  return *map;
}

ParameterRange read_range(Reader& in, const std::string& key, const std::string& fallback) {
  const auto t = in.take(key);
  const auto toks = split_ws(t.value_or(fallback));
  if (toks.size() != 3) in.fail(key, "expected 'min max count'");
  ParameterRange r{in.number(key, toks[0]), in.number(key, toks[1]), in.integer<int>(key, toks[2])};
  if (r.count < 1) in.fail(key, "count must be >= 1");
  if (r.max < r.min) in.fail(key, "max must not be below min");
  return r;
}

void read_sweep(Reader& in, ExperimentConfig& cfg) {
  auto& s = cfg.sweep;
  const std::string family = in.required("sweep.family");
  const auto kind = family_kind_from_string(family);
  if (!kind) in.fail("sweep.family", "expected scaled_identity or rotation_scale");
  if (*kind == FamilyKind::kRotationScale && cfg.dimension != 2) {
    in.fail("sweep.family", "rotation_scale requires space.dimension = 2");
  }
  s.family.kind = *kind;
  s.family.dimension = cfg.dimension;
  s.family.theta = read_range(in, "sweep.theta", "");
  s.family.phi = read_range(in, "sweep.phi", "0 0 1");
  const auto offset = in.take("sweep.offset");
  s.family.offset = offset ? in.vector("sweep.offset", *offset, cfg.dimension) : Vector::Zero(cfg.dimension);
  s.exponents.clear();
  for (const auto& tok : split_ws(in.required("sweep.norms"))) s.exponents.push_back(in.exponent("sweep.norms", tok));
  if (s.exponents.empty()) in.fail("sweep.norms", "at least one exponent is required");
  s.range_check_samples = in.count("sweep.range_check_samples", 64, 1);
  const std::string planted = in.take("sweep.planted").value_or("none");
  if (planted == "none") {
    s.planted.reset();
  } else {
    const auto toks = split_ws(planted);
    if (toks.size() != 2) in.fail("sweep.planted", "expected 'none' or 'cell y_index'");
    s.planted = std::make_pair(in.integer<std::size_t>("sweep.planted", toks[0]),
                               in.integer<std::size_t>("sweep.planted", toks[1]));
  }
}

bool same_range(const ParameterRange& a, const ParameterRange& b) { return a == b; }

bool same_points(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_vector(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) return name;
  }
  return "FIND_FIXED_POINT";
}

std::optional<ExperimentKind> experiment_kind_from_string(const std::string& name) {
  for (const auto& [kind, n] : kKinds) {
    if (name == n) return kind;
  }
  return std::nullopt;
}

ConfigError::ConfigError(std::string origin, std::string field, const std::string& message)
    : InputError(fmt::format("{}: field {}: {}", origin, field, message)),
      origin_(std::move(origin)),
      field_(std::move(field)) {}

NormSpec ExperimentConfig::norm_spec() const {
  if (!p) throw InputError("config carries no single norm (sweep configs use sweep.norms)");
  return weights.size() == 0 ? NormSpec::lp(*p, dimension) : NormSpec::weighted_lp(*p, weights);
}

std::vector<NormSpec> ExperimentConfig::sweep_norms() const {
  std::vector<NormSpec> out;
  for (const auto& e : sweep.exponents) out.push_back(NormSpec::lp(e, dimension));
  return out;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto& sa = a.sweep;
  const auto& sb = b.sweep;
  const bool sweep_equal = sa.family.kind == sb.family.kind && sa.family.dimension == sb.family.dimension &&
                           same_range(sa.family.theta, sb.family.theta) && same_range(sa.family.phi, sb.family.phi) &&
                           same_vector(sa.family.offset, sb.family.offset) && sa.exponents == sb.exponents &&
                           sa.range_check_samples == sb.range_check_samples && sa.planted == sb.planted;
  const bool x_star_equal =
      a.x_star.has_value() == b.x_star.has_value() && (!a.x_star || same_vector(*a.x_star, *b.x_star));
  return a.experiment == b.experiment && a.seed == b.seed && a.dimension == b.dimension && a.p == b.p &&
         same_vector(a.weights, b.weights) && a.set == b.set && a.map == b.map && sweep_equal &&
         a.optimizer == b.optimizer && a.growth_radii == b.growth_radii &&
         a.growth_directions == b.growth_directions && a.margin == b.margin &&
         a.radius_override == b.radius_override && a.fallback_radius == b.fallback_radius &&
         a.y.kind == b.y.kind && a.y.per_axis == b.y.per_axis && a.y.extent == b.y.extent &&
         same_points(a.y.points, b.y.points) && a.check_samples == b.check_samples &&
         a.check_radius == b.check_radius && a.locate_tol == b.locate_tol && x_star_equal &&
         a.saddle_tol == b.saddle_tol && a.minimax_radius == b.minimax_radius &&
         a.minimax_resolution == b.minimax_resolution && a.minimax_tol == b.minimax_tol;
}

std::vector<Assignment> read_assignments(const std::string& text, const std::string& source) {
  std::vector<Assignment> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string origin = fmt::format("{}:{}", source, lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin, "?", "expected 'key = value'");
    Assignment a{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), origin};
    if (a.key.empty()) throw ConfigError(origin, "?", "empty key");
    if (!seen.insert(a.key).second) throw ConfigError(origin, a.key, "duplicate key");
    out.push_back(std::move(a));
  }
  return out;
}

Assignment parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || trim(text.substr(0, eq)).empty()) {
    throw ConfigError("--override", text, "expected key=value");
  }
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1)), "--override"};
}

ExperimentConfig build_config(const std::vector<Assignment>& file, const std::vector<Assignment>& overrides) {
  std::map<std::string, Assignment> merged;
  for (const auto& a : file) merged[a.key] = a;
  for (const auto& a : overrides) merged[a.key] = a;
  Reader in(std::move(merged));

  ExperimentConfig cfg;
  const std::string kind = in.required("experiment");
  const auto parsed = experiment_kind_from_string(kind);
  if (!parsed) in.fail("experiment", fmt::format("unknown experiment '{}'", kind));
  cfg.experiment = *parsed;
  const bool sweep = cfg.experiment == ExperimentKind::kSearchCounterexample;

  cfg.seed = in.integer<std::uint64_t>("seed", std::uint64_t{0});
  cfg.dimension = in.integer<int>("space.dimension", in.required("space.dimension"));
  if (cfg.dimension < 1) in.fail("space.dimension", "must be >= 1");
  const int n = cfg.dimension;

  if (!sweep) {
    cfg.p = in.exponent("space.p", in.required("space.p"));
    if (const auto w = in.take("space.weights")) {
      cfg.weights = in.vector("space.weights", *w, n);
      try {
        NormSpec::weighted_lp(*cfg.p, cfg.weights);
      } catch (const InputError& e) {
        in.fail("space.weights", e.what());
      }
    }
  }
  cfg.set = read_set(in, n);
  if (sweep) {
    read_sweep(in, cfg);
  } else {
    cfg.map = read_map(in, n);
  }

  auto& opt = cfg.optimizer;
  opt.grid_resolution = in.integer<int>("optimizer.grid_resolution", opt.grid_resolution);
  opt.multistart = in.integer<int>("optimizer.multistart", opt.multistart);
  opt.random_starts = in.integer<int>("optimizer.random_starts", opt.random_starts);
  const std::string step = in.take("optimizer.initial_step").value_or("auto");
  if (step != "auto") opt.initial_step = in.number("optimizer.initial_step", step);
  opt.shrink = in.number("optimizer.shrink", opt.shrink);
  opt.termination_step = in.number("optimizer.termination_step", opt.termination_step);
  opt.eps_val = in.number("optimizer.eps_val", opt.eps_val);
  opt.delta_sep = in.number("optimizer.delta_sep", opt.delta_sep);
  opt.budget = in.integer<std::int64_t>("optimizer.budget", opt.budget);
  opt.seed = cfg.seed;
  try {
    opt.validate();
  } catch (const InputError& e) {
    throw ConfigError("config", "optimizer", e.what());
  }

  if (const auto radii = in.take("growth.radii")) {
    cfg.growth_radii.clear();
    for (const auto& tok : split_ws(*radii)) cfg.growth_radii.push_back(in.number("growth.radii", tok));
  }
  if (cfg.growth_radii.empty() || !std::is_sorted(cfg.growth_radii.begin(), cfg.growth_radii.end()) ||
      cfg.growth_radii.front() <= 0.0) {
    in.fail("growth.radii", "expected a non-empty increasing list of positive radii");
  }
  cfg.growth_directions = in.count("growth.directions", cfg.growth_directions, 1);

  cfg.margin = in.positive("certify.margin", cfg.margin);
  const std::string radius = in.take("certify.radius").value_or("auto");
  if (radius != "auto") {
    cfg.radius_override = in.number("certify.radius", radius);
    if (!(*cfg.radius_override > 0.0)) in.fail("certify.radius", "expected 'auto' or a positive number");
  }
  cfg.fallback_radius = in.positive("certify.fallback_radius", cfg.fallback_radius);

  const std::string ykind = in.take("sampling.y").value_or("grid");
  if (ykind == "grid") {
    cfg.y.kind = YSamplingKind::kGrid;
  } else if (ykind == "list") {
    cfg.y.kind = YSamplingKind::kList;
    const Matrix pts = in.matrix("sampling.y_points", -1, n);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const Vector y = pts.row(i).transpose();
      if (!contains(cfg.set, y, kMembershipTol)) in.fail("sampling.y_points", fmt::format("row {} lies outside the set", i));
      cfg.y.points.push_back(y);
    }
    if (cfg.y.points.empty()) in.fail("sampling.y_points", "at least one point is required");
  } else {
    in.fail("sampling.y", "expected grid or list");
  }
  cfg.y.per_axis = in.count("sampling.y_per_axis", cfg.y.per_axis, 1);
  cfg.y.extent = in.positive("sampling.y_extent", cfg.y.extent);
  cfg.check_samples = in.count("sampling.check_samples", cfg.check_samples, 1);
  cfg.check_radius = in.positive("sampling.check_radius", cfg.check_radius);

  cfg.locate_tol = in.positive("fixed_point.locate_tol", cfg.locate_tol);

  const std::string x_star = in.take("saddle.x_star").value_or("analytic");
  if (x_star != "analytic") {
    cfg.x_star = in.vector("saddle.x_star", x_star, n);
    if (!contains(cfg.set, *cfg.x_star, kMembershipTol)) in.fail("saddle.x_star", "lies outside the set");
  }
  cfg.saddle_tol = in.positive("saddle.tol", cfg.saddle_tol);

  cfg.minimax_radius = in.positive("minimax.radius", cfg.minimax_radius);
  cfg.minimax_resolution = in.count("minimax.resolution", cfg.minimax_resolution, 1);
  cfg.minimax_tol = in.positive("minimax.tol", cfg.minimax_tol);

  in.finish();
  return cfg;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const std::vector<Assignment>& overrides) {
  return build_config(read_assignments(text, source), overrides);
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

std::string format_matrix(const Matrix& m) {
  std::string out = fmt::format("[{}x{}]", m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += ' ' + format_double(m(i, j));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> serialize_config(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  auto put = [&](std::string key, std::string value) { out.emplace_back(std::move(key), std::move(value)); };
  const int n = cfg.dimension;

  put("experiment", to_string(cfg.experiment));
  put("seed", std::to_string(cfg.seed));
  put("space.dimension", std::to_string(n));
  if (cfg.p) put("space.p", cfg.p->to_string());
  if (cfg.weights.size() > 0) put("space.weights", format_vector(cfg.weights));

  const auto& set = cfg.set;
  switch (set.kind()) {
    case SetKind::kFullSpace:
      put("set.kind", "full_space");
      break;
    case SetKind::kOrthant:
      put("set.kind", "orthant");
      put("set.lower", format_vector(set.lower()));
      break;
    case SetKind::kHalfSpace:
      put("set.kind", "half_space");
      put("set.normal", format_vector(set.constraints().front().a));
      put("set.offset", format_double(set.constraints().front().c));
      break;
    case SetKind::kConeIntersection: {
      put("set.kind", "cone_intersection");
      const auto& hs = set.constraints();
      Matrix normals(static_cast<Eigen::Index>(hs.size()), n);
      Vector offsets(static_cast<Eigen::Index>(hs.size()));
      for (std::size_t i = 0; i < hs.size(); ++i) {
        normals.row(static_cast<Eigen::Index>(i)) = hs[i].a.transpose();
        offsets[static_cast<Eigen::Index>(i)] = hs[i].c;
      }
      put("set.normals", format_matrix(normals));
      put("set.offsets", format_vector(offsets));
      break;
    }
  }

  if (cfg.map) {
    const bool projected = cfg.map->family() == MapFamily::kComposedWithProjection;
    const MapSpec& m = projected ? cfg.map->inner() : *cfg.map;
    switch (m.family()) {
      case MapFamily::kAffine:
        put("map.family", "affine");
        put("map.a", format_matrix(m.matrix()));
        put("map.b", format_vector(m.offset()));
        break;
      case MapFamily::kConstant:
        put("map.family", "constant");
        put("map.c", format_vector(m.offset()));
        break;
      case MapFamily::kAffinePlusBounded:
        put("map.family", "affine_plus_bounded");
        put("map.a", format_matrix(m.matrix()));
        put("map.b", format_vector(m.offset()));
        put("map.perturbation", to_string(m.perturbation()));
        put("map.amplitude", format_double(m.amplitude()));
        break;
      case MapFamily::kComposedWithProjection:
        throw InputError("nested projection compositions are not representable in the config format");
    }
    put("map.project", projected ? "true" : "false");
  }

  if (cfg.experiment == ExperimentKind::kSearchCounterexample) {
    const auto& s = cfg.sweep;
    auto range = [](const ParameterRange& r) {
      return fmt::format("{} {} {}", format_double(r.min), format_double(r.max), r.count);
    };
    put("sweep.family", to_string(s.family.kind));
    put("sweep.theta", range(s.family.theta));
    put("sweep.phi", range(s.family.phi));
    put("sweep.offset", format_vector(s.family.offset));
    std::string norms;
    for (const auto& e : s.exponents) norms += (norms.empty() ? "" : " ") + e.to_string();
    put("sweep.norms", norms);
    put("sweep.range_check_samples", std::to_string(s.range_check_samples));
    put("sweep.planted", s.planted ? fmt::format("{} {}", s.planted->first, s.planted->second) : "none");
  }

  const auto& opt = cfg.optimizer;
  put("optimizer.grid_resolution", std::to_string(opt.grid_resolution));
  put("optimizer.multistart", std::to_string(opt.multistart));
  put("optimizer.random_starts", std::to_string(opt.random_starts));
  put("optimizer.initial_step", opt.initial_step ? format_double(*opt.initial_step) : "auto");
  put("optimizer.shrink", format_double(opt.shrink));
  put("optimizer.termination_step", format_double(opt.termination_step));
  put("optimizer.eps_val", format_double(opt.eps_val));
  put("optimizer.delta_sep", format_double(opt.delta_sep));
  put("optimizer.budget", std::to_string(opt.budget));

  Vector radii = Eigen::Map<const Vector>(cfg.growth_radii.data(), static_cast<Eigen::Index>(cfg.growth_radii.size()));
  put("growth.radii", format_vector(radii));
  put("growth.directions", std::to_string(cfg.growth_directions));

  put("certify.margin", format_double(cfg.margin));
  put("certify.radius", cfg.radius_override ? format_double(*cfg.radius_override) : "auto");
  put("certify.fallback_radius", format_double(cfg.fallback_radius));

  put("sampling.y", cfg.y.kind == YSamplingKind::kGrid ? "grid" : "list");
  if (cfg.y.kind == YSamplingKind::kList) {
    Matrix pts(static_cast<Eigen::Index>(cfg.y.points.size()), n);
    for (std::size_t i = 0; i < cfg.y.points.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = cfg.y.points[i].transpose();
    put("sampling.y_points", format_matrix(pts));
  }
  put("sampling.y_per_axis", std::to_string(cfg.y.per_axis));
  put("sampling.y_extent", format_double(cfg.y.extent));
  put("sampling.check_samples", std::to_string(cfg.check_samples));
  put("sampling.check_radius", format_double(cfg.check_radius));

  put("fixed_point.locate_tol", format_double(cfg.locate_tol));
  put("saddle.x_star", cfg.x_star ? format_vector(*cfg.x_star) : "analytic");
  put("saddle.tol", format_double(cfg.saddle_tol));

  put("minimax.radius", format_double(cfg.minimax_radius));
  put("minimax.resolution", std::to_string(cfg.minimax_resolution));
  put("minimax.tol", format_double(cfg.minimax_tol));
  return out;
}

}  // namespace tiltmin
