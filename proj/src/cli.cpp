#include "tiltmin/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace tiltmin {

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::vector<std::string> coordinate_columns(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(fmt::format("{}{}", prefix, i));
  return out;
}

void append_coordinates(std::vector<std::string>& row, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(format_double(v[i]));
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void put_growth(Report& r, const GrowthEstimate& g) {
  r.set("result.growth.method", to_string(g.method));
  r.set("result.growth.kappa_hat", g.kappa_hat);
  r.set_bool("result.growth.satisfied", g.satisfied);
  r.set("result.growth.offset", g.offset);
  Vector radii = Eigen::Map<const Vector>(g.radii.data(), static_cast<Eigen::Index>(g.radii.size()));
  r.set("result.growth.radii", radii);
}

void put_minimization(Report& r, const std::string& prefix, const MinimizationResult& m) {
  r.set(prefix + ".status", to_string(m.status));
  r.set(prefix + ".radius", m.radius);
  r.set(prefix + ".global_value", m.global_value);
  r.set_int(prefix + ".evaluations", m.evaluations);
  r.set_int(prefix + ".clusters", static_cast<long long>(m.clusters.size()));
}

void minima_rows(Table& t, const std::vector<std::string>& lead, const MinimizationResult& m) {
  for (std::size_t k = 0; k < m.clusters.size(); ++k) {
    auto row = lead;
    row.push_back(std::to_string(k));
    append_coordinates(row, m.clusters[k].point);
    row.push_back(format_double(m.clusters[k].value));
    t.rows.push_back(std::move(row));
  }
}

GrowthEstimate growth_for(const ExperimentConfig& cfg, const MapSpec& map, const NormSpec& spec) {
  return growth_coefficient(map, spec, cfg.set, cfg.growth_radii, cfg.growth_directions, derive_seed(cfg.seed, 101));
}

void put_saddle(Report& r, const SaddleReport& s, int n) {
  r.set("result.x_star", s.x_star);
  r.set("result.residual", s.residual);
  r.set("result.min_check", s.min_check);
  r.set("result.min_witness", s.min_witness);
  r.set("result.strict_check", s.strict_check);
  r.set("result.strict_witness", s.strict_witness);
  r.set("result.displacement_margin", s.displacement_margin);
  r.set("result.criterion_excess", s.criterion_excess);
  r.set_int("result.y_samples", s.y_samples);
  r.set_int("result.x_samples", s.x_samples);
  r.set("result.residual_tol", s.residual_tol);
  r.set("result.saddle_tol", s.saddle_tol);
  r.set("result.criterion_tol", s.criterion_tol);
  r.set_bool("result.residual_ok", s.residual_ok);
  r.set_bool("result.min_ok", s.min_ok);
  r.set_bool("result.strict_ok", s.strict_ok);
  r.set_bool("result.displacement_ok", s.displacement_ok);
  r.set_bool("result.criterion_ok", s.criterion_ok);
  r.set_bool("result.passed", s.passed());
  put_minimization(r, "result.minimization", s.minimization);
  auto& t = r.table("minima", concat({"cluster"}, concat(coordinate_columns("x", n), {"phi"})));
  minima_rows(t, {}, s.minimization);
}

int run_fixed_point(const ExperimentConfig& cfg, int jobs, Report& r) {
  const auto spec = cfg.norm_spec();
  const TiltedFunctional f(spec, cfg.set, *cfg.map);
  const auto growth = growth_for(cfg, *cfg.map, spec);
  put_growth(r, growth);
  const auto oracle = analytic_fixed_point(*cfg.map);
  if (oracle.point) r.set("result.analytic_fixed_point", *oracle.point);
  FixedPointOptions opts{cfg.margin, cfg.check_radius, cfg.locate_tol, jobs};
  try {
    const auto s = find_fixed_point(f, growth, cfg.optimizer, cfg.check_samples, cfg.seed, opts);
    put_saddle(r, s, cfg.dimension);
    if (oracle.point) r.set("result.analytic_distance", norm(s.x_star - *oracle.point, spec));
    r.set("result.verdict", s.passed() ? "SADDLE_VERIFIED" : "SADDLE_CHECK_FAILED");
    return 0;
  } catch (const FixedPointNotLocated& e) {
    put_saddle(r, e.report(), cfg.dimension);
    throw;
  }
}

std::vector<Vector> y_samples(const ExperimentConfig& cfg) {
  if (cfg.y.kind == YSamplingKind::kList) return cfg.y.points;
  return box_grid_points(cfg.set, cfg.y.extent, cfg.y.per_axis);
}

int run_certify(const ExperimentConfig& cfg, int jobs, Report& r) {
  const auto spec = cfg.norm_spec();
  const TiltedFunctional f(spec, cfg.set, *cfg.map);
  const auto growth = growth_for(cfg, *cfg.map, spec);
  put_growth(r, growth);
  CertifyOptions opts;
  opts.margin = cfg.margin;
  opts.radius_override = cfg.radius_override;
  opts.fallback_radius = cfg.fallback_radius;
  opts.jobs = jobs;
  const auto rep = certify_uniqueness(f, y_samples(cfg), growth, cfg.optimizer, opts);

  r.set("result.verdict", to_string(rep.overall));
  r.set("result.eps_val", rep.eps_val);
  r.set("result.delta_sep", rep.delta_sep);
  r.set_bool("result.radius_override", rep.radius_override);
  r.set_int("result.entries", static_cast<long long>(rep.entries.size()));
  std::size_t multiple = 0;
  for (const auto& e : rep.entries) multiple += e.verdict == Verdict::kMultipleFound;
  r.set_int("result.multiple_entries", static_cast<long long>(multiple));

  const int n = cfg.dimension;
  auto& entries = r.table("entries", concat(concat({"y_index"}, coordinate_columns("y", n)),
                                            {"radius", "incumbent", "global_value", "clusters", "status", "verdict"}));
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const auto& e = rep.entries[i];
    std::vector<std::string> row{std::to_string(i)};
    append_coordinates(row, e.y);
    row.insert(row.end(), {format_double(e.radius), format_double(e.incumbent),
                           format_double(e.minimization.global_value), std::to_string(e.minimization.clusters.size()),
                           to_string(e.minimization.status), to_string(e.verdict)});
    entries.rows.push_back(std::move(row));
  }
  auto& minima = r.table("minima", concat({"y_index", "cluster"}, concat(coordinate_columns("x", n), {"value"})));
  for (std::size_t i = 0; i < rep.entries.size(); ++i) minima_rows(minima, {std::to_string(i)}, rep.entries[i].minimization);
  return rep.overall == Verdict::kMultipleFound ? 2 : 0;
}

int run_minimax(const ExperimentConfig& cfg, int jobs, Report& r) {
  const TiltedFunctional f(cfg.norm_spec(), cfg.set, *cfg.map);
  MinimaxOptions opts;
  opts.tol = cfg.minimax_tol;
  opts.delta_sep = cfg.optimizer.delta_sep;
  opts.jobs = jobs;
  const auto m = minimax_gap(as_bifunctional(f), cfg.minimax_radius, cfg.minimax_resolution, opts);
  r.set("result.lower", m.lower);
  r.set("result.upper", m.upper);
  r.set("result.gap", m.gap);
  r.set("result.x_witness", m.x_witness);
  r.set("result.y_witness", m.y_witness);
  r.set_bool("result.x_on_boundary", m.x_on_boundary);
  r.set_bool("result.y_on_boundary", m.y_on_boundary);
  r.set("result.witness_distance", m.witness_distance);
  r.set_bool("result.witnesses_coincide", m.witnesses_coincide);
  r.set_bool("result.weak_duality_ok", m.weak_duality_ok);
  r.set("result.tol", m.tol);
  auto& t = r.table("witnesses", concat({"role"}, coordinate_columns("x", cfg.dimension)));
  std::vector<std::string> x{"upper_x"};
  append_coordinates(x, m.x_witness);
  std::vector<std::string> y{"lower_y"};
  append_coordinates(y, m.y_witness);
  t.rows = {x, y};
  return 0;
}

int run_saddle(const ExperimentConfig& cfg, Report& r) {
  const auto spec = cfg.norm_spec();
  const TiltedFunctional f(spec, cfg.set, *cfg.map);
  Vector x_star;
  if (cfg.x_star) {
    x_star = *cfg.x_star;
  } else {
    const auto oracle = analytic_fixed_point(*cfg.map);
    if (!oracle.point) throw InputError("saddle.x_star = analytic but no closed form: " + oracle.note);
    x_star = *oracle.point;
  }
  const auto j = as_bifunctional(f);
  const auto ys = random_feasible_points(cfg.set, spec, cfg.check_radius, cfg.check_samples, derive_seed(cfg.seed, 21));
  const auto xs = random_feasible_points(cfg.set, spec, cfg.check_radius, cfg.check_samples, derive_seed(cfg.seed, 22));
  const auto s = verify_saddle(j, x_star, ys, xs, cfg.saddle_tol, cfg.optimizer.delta_sep);
  r.set("result.x_star", x_star);
  r.set("result.max_value", s.max_value);
  r.set("result.max_witness", s.max_witness);
  r.set("result.min_value", s.min_value);
  r.set("result.min_far_value", s.min_far_value);
  r.set("result.min_far_witness", s.min_far_witness);
  r.set_bool("result.max_ok", s.max_ok);
  r.set_bool("result.nonnegative_ok", s.nonnegative_ok);
  r.set_bool("result.strict_ok", s.strict_ok);
  r.set_bool("result.passed", s.passed());
  r.set("result.verdict", s.passed() ? "SADDLE_VERIFIED" : "SADDLE_CHECK_FAILED");
  auto& t = r.table("samples", concat(concat({"role", "index"}, coordinate_columns("p", cfg.dimension)), {"value"}));
  for (std::size_t i = 0; i < ys.size(); ++i) {
    std::vector<std::string> row{"y", std::to_string(i)};
    append_coordinates(row, ys[i]);
    row.push_back(format_double(j(x_star, ys[i])));
    t.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<std::string> row{"x", std::to_string(i)};
    append_coordinates(row, xs[i]);
    row.push_back(format_double(j(xs[i], x_star)));
    t.rows.push_back(std::move(row));
  }
  return 0;
}

// Two wells at x_0 = +-1 with an exact value tie.
double planted_two_wells(const Vector& x, const Vector&) {
  const double t = x[0] * x[0] - 1.0;
  return t * t + x.tail(x.size() - 1).squaredNorm();
}

int run_sweep(const ExperimentConfig& cfg, int jobs, Report& r) {
  SweepConfig sweep;
  sweep.margin = cfg.margin;
  sweep.range_check_samples = cfg.sweep.range_check_samples;
  sweep.seed = cfg.seed;
  sweep.jobs = jobs;
  if (cfg.sweep.planted) sweep.planted = PlantedCell{cfg.sweep.planted->first, cfg.sweep.planted->second, planted_two_wells};
  const auto norms = cfg.sweep_norms();
  const auto rep = search_counterexample(cfg.sweep.family, cfg.set, norms, {cfg.y.per_axis, cfg.y.extent}, sweep,
                                         cfg.optimizer);
  r.set_int("result.cells_total", static_cast<long long>(rep.cells_total));
  r.set_int("result.cells_run", static_cast<long long>(rep.cells_run));
  r.set_int("result.skipped_range", static_cast<long long>(rep.skipped_range));
  r.set_int("result.skipped_growth", static_cast<long long>(rep.skipped_growth));
  r.set_int("result.entries", static_cast<long long>(rep.entries));
  r.set_int("result.vacuous_entries", static_cast<long long>(rep.vacuous_entries));
  r.set_int("result.verify_resolution", rep.verify_resolution);
  r.set("result.verify_eps_val", rep.verify_eps_val);
  r.set_int("result.candidates", static_cast<long long>(rep.candidates.size()));
  r.set_int("result.rejected", static_cast<long long>(rep.rejected.size()));
  r.set("result.verdict", rep.candidates.empty() ? "NO_CANDIDATES" : "MULTIPLE_FOUND");

  const int n = cfg.dimension;
  const std::vector<std::string> columns =
      concat(concat({"rank", "cell", "theta", "phi", "norm_p", "y_index"}, coordinate_columns("y", n)),
             {"radius", "clusters", "value_gap", "separation", "score", "verified_clusters", "kappa_method", "planted"});
  auto fill = [&](Table& t, const std::vector<CounterexampleCandidate>& cs) {
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const auto& c = cs[k];
      std::vector<std::string> row{std::to_string(k), std::to_string(c.cell), format_double(c.theta),
                                   format_double(c.phi), cfg.sweep.exponents[c.norm_index].to_string(),
                                   std::to_string(c.y_index)};
      append_coordinates(row, c.y);
      row.insert(row.end(), {format_double(c.radius), std::to_string(c.clusters.size()), format_double(c.value_gap),
                             format_double(c.separation), format_double(c.score), std::to_string(c.verified_clusters),
                             to_string(c.kappa_method), c.planted ? "true" : "false"});
      t.rows.push_back(std::move(row));
    }
  };
  fill(r.table("candidates", columns), rep.candidates);
  fill(r.table("rejected", columns), rep.rejected);
  return rep.candidates.empty() ? 0 : 2;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read config file '{}'", path));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

void Report::set(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
void Report::set(std::string key, double value) { set(std::move(key), format_double(value)); }
void Report::set(std::string key, const Vector& value) { set(std::move(key), format_vector(value)); }
void Report::set_int(std::string key, long long value) { set(std::move(key), std::to_string(value)); }
void Report::set_bool(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }

Table& Report::table(std::string name, std::vector<std::string> columns) {
  tables_.push_back({std::move(name), std::move(columns), {}});
  return tables_.back();
}

std::string Report::text() const {
  std::string out = "# tiltmin experiment report\n";
  for (const auto& [k, v] : entries_) out += fmt::format("{} = {}\n", k, v);
  return out;
}

std::string table_csv(const Table& t) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    return s + "\n";
  };
  std::string out = line(t.columns);
  for (const auto& row : t.rows) out += line(row);
  return out;
}

void Report::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto dump = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", p.string()));
    out << text;
  };
  dump(dir / "report.txt", text());
  for (const auto& t : tables_) dump(dir / (t.name + ".csv"), table_csv(t));
}

std::vector<Assignment> embedded_config(const std::string& report_text, const std::string& source) {
  std::vector<Assignment> out;
  for (auto& a : read_assignments(report_text, source)) {
    if (a.key.rfind("config.", 0) == 0) {
      a.key.erase(0, 7);
      out.push_back(std::move(a));
    }
  }
  return out;
}

RunOutcome run_experiment(const ExperimentConfig& config, int jobs) {
  RunOutcome outcome;
  auto& r = outcome.report;
  r.set("tool.name", std::string("tiltmin"));
  r.set("tool.version", std::string(kToolVersion));
  for (const auto& [k, v] : serialize_config(config)) r.set("config." + k, v);
  try {
    int code = 0;
    switch (config.experiment) {
      case ExperimentKind::kFindFixedPoint:
        code = run_fixed_point(config, jobs, r);
        break;
      case ExperimentKind::kCertifyUniqueness:
        code = run_certify(config, jobs, r);
        break;
      case ExperimentKind::kMinimaxGap:
        code = run_minimax(config, jobs, r);
        break;
      case ExperimentKind::kVerifySaddle:
        code = run_saddle(config, r);
        break;
      case ExperimentKind::kSearchCounterexample:
        code = run_sweep(config, jobs, r);
        break;
    }
    r.set("result.status", std::string("completed"));
    outcome.exit_code = code;
  } catch (const std::exception& e) {
    r.set("result.status", std::string("error"));
    r.set("result.error", std::string(e.what()));
    outcome.exit_code = 1;
  }
  r.set_int("result.exit_code", outcome.exit_code);
  return outcome;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"tiltmin: tilted-functional fixed-point and uniqueness experiments"};
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "tiltmin_out";
    std::vector<std::string> overrides;
    int jobs = 1;
  } args;

  auto add_common = [&](CLI::App* sub, bool writes) {
    sub->add_option("--config", args.config, "experiment config file")->required();
    sub->add_option("--seed", args.seed, "replace the config seed");
    sub->add_option("--override", args.overrides, "key=value replacing a config entry (repeatable)");
    if (writes) {
      sub->add_option("--out", args.out, "output directory for report.txt and tables");
      sub->add_option("--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber);
    }
  };
  auto* run = app.add_subcommand("run", "run the configured experiment");
  auto* validate = app.add_subcommand("validate", "parse, validate and print the resolved config");
  auto* sweep = app.add_subcommand("sweep", "run a SEARCH_COUNTEREXAMPLE config");
  add_common(run, true);
  add_common(validate, false);
  add_common(sweep, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  ExperimentConfig config;
  try {
    std::vector<Assignment> overrides;
    for (const auto& o : args.overrides) overrides.push_back(parse_override(o));
    if (args.seed) overrides.push_back({"seed", std::to_string(*args.seed), "--seed"});
    config = parse_config(read_file(args.config), args.config, overrides);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (validate->parsed()) {
    for (const auto& [k, v] : serialize_config(config)) out << k << " = " << v << "\n";
    return 0;
  }
  if (sweep->parsed() && config.experiment != ExperimentKind::kSearchCounterexample) {
    err << "error: " << args.config << ": field experiment: sweep requires SEARCH_COUNTEREXAMPLE\n";
    return 1;
  }

  const auto outcome = run_experiment(config, args.jobs);
  try {
    outcome.report.write(args.out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& [k, v] : outcome.report.entries()) {
    if (k == "result.verdict" || k == "result.error") out << k << " = " << v << "\n";
  }
  out << "report: " << (std::filesystem::path(args.out) / "report.txt").string() << "\n";
  return outcome.exit_code;
}

}  // namespace tiltmin
