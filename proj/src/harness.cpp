#include "zeroopt/harness.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "zeroopt/errors.hpp"
#include "zeroopt/objective_json.hpp"
#include "zeroopt/trace_io.hpp"

namespace zeroopt {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Bbs: return "bbs";
    case SolverKind::MultiBbs: return "multibbs";
    case SolverKind::DirBbs: return "dirbbs";
    case SolverKind::Zogd: return "zogd";
  }
  return "unknown";
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::DocumentedViolation: return "documented_violation";
  }
  return "unknown";
}

bool RunSummary::all_checks_ok() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

std::size_t objective_dimension(const ObjectiveSpec& spec) {
  if (std::holds_alternative<OscillatingParabola>(spec)) return 1;
  if (std::holds_alternative<Levy2D>(spec)) return 2;
  if (const auto* s = std::get_if<SyntheticVeryGood>(&spec)) return s->x_star.size();
  if (const auto* q = std::get_if<NoisyQuadratic>(&spec)) return q->x_star.size();
  return std::get<UserAnalytic>(spec).dim;
}

// Extreme eigenvalues of A, i.e. the (mu, L) pair of the quadratic.
std::pair<double, double> spectrum_bounds(const NoisyQuadratic& q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.matrix_a, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

// Value of the objective without oracle noise, for reporting.
double clean_value(const ObjectiveSpec& spec, const Vector& x) {
  if (const auto* q = std::get_if<NoisyQuadratic>(&spec)) {
    NoisyQuadratic clean = *q;
    clean.sigma = 0.0;
    clean.delta_bound = 0.0;
    return OracleHandle(clean).value(x);
  }
  return OracleHandle(spec).value(x);
}

CheckResult make_check(std::string name, bool ok, double margin, std::string note = {}) {
  return {std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, margin, std::move(note)};
}

double contraction_of(const ExperimentConfig& c) {
  switch (c.solver) {
    case SolverKind::Bbs: return 2.0;
    case SolverKind::MultiBbs: return c.alpha;
    case SolverKind::DirBbs: return 1.5;
    case SolverKind::Zogd: break;
  }
  return 1.0;
}

std::vector<CheckResult> trace_checks(const RunTrace& trace, const ExperimentConfig& c,
                                      const std::optional<Vector>& x_star) {
  std::vector<CheckResult> out;
  const double factor = contraction_of(c);
  const std::size_t d = trace.initial_box.dimension();

  bool monotone = true;
  double contraction_margin = std::numeric_limits<double>::infinity();
  bool calls_ok = true;
  std::uint64_t call_sum = 0;
  for (const auto& rec : trace.iterations) {
    monotone = monotone && rec.box_before.contains(rec.box_after);
    const double before = max_edge(rec.box_before);
    if (before > 0.0) {
      const double limit = (1.0 + 1e-12) / factor;
      contraction_margin = std::min(contraction_margin, limit - max_edge(rec.box_after) / before);
    }
    std::uint64_t expected = 0;
    switch (c.solver) {
      case SolverKind::Bbs: expected = trace.grid_n + 1; break;
      case SolverKind::MultiBbs: expected = build_grid(rec.box_before, trace.grid_n).total_points(); break;
      case SolverKind::DirBbs: expected = d * (trace.grid_n + 1); break;
      case SolverKind::Zogd: break;
    }
    calls_ok = calls_ok && rec.oracle_calls_this_iter == expected;
    call_sum += rec.oracle_calls_this_iter;
  }
  if (trace.iterations.empty()) contraction_margin = 0.0;
  out.push_back(make_check("box_monotone", monotone, 0.0));
  out.push_back(make_check("contraction", contraction_margin >= 0.0, contraction_margin,
                           "max_edge ratio per iteration <= 1/" + format_double(factor)));
  out.push_back(make_check("call_accounting", calls_ok && call_sum == trace.total_calls, 0.0));

  const double eps_eff = c.solver == SolverKind::MultiBbs ? c.epsilon : 2.0 * c.epsilon;
  const std::size_t bound = required_iterations(trace.initial_box, eps_eff, factor);
  out.push_back(make_check("iteration_bound", trace.iterations.size() <= bound,
                           static_cast<double>(bound) - static_cast<double>(trace.iterations.size())));

  if (x_star) {
    double inside = std::numeric_limits<double>::infinity();
    const double tol = 1e-12 * std::max(1.0, max_edge(trace.initial_box));
    for (const auto& rec : trace.iterations) {
      for (std::size_t j = 0; j < d; ++j) {
        inside = std::min({inside, (*x_star)[j] - rec.box_after.lower()[j],
                           rec.box_after.upper()[j] - (*x_star)[j]});
      }
    }
    if (trace.iterations.empty()) inside = 0.0;
    out.push_back(make_check("solution_retention", inside >= -tol, inside));
    const double err = distance(trace.final_point, *x_star);
    out.push_back(make_check("final_within_epsilon", err <= c.epsilon, c.epsilon - err));
  }
  return out;
}

CheckResult run_class_check(const ClassCheckSpec& spec, const ExperimentConfig& c) {
  OracleHandle handle(c.objective);
  const auto x_star = handle.known_minimizer();
  if (!x_star) config_error("class check \"" + spec.name + "\" needs a known minimizer");
  const ClassReport report = spec.kind == ClassCheckSpec::Kind::Good
                                 ? verify_good_class(handle, *c.box, spec.good, *x_star, spec.grid_n)
                                 : verify_very_good_class(handle, *c.box, spec.very_good, *x_star, spec.grid_n);
  CheckResult r;
  r.name = spec.name;
  r.margin = report.worst_margin;
  r.note = spec.note.empty() ? std::to_string(report.violations.size()) + " violations" :
                               spec.note + " (" + std::to_string(report.violations.size()) + " violations)";
  if (report.holds == spec.expect_hold) {
    r.status = report.holds ? CheckStatus::Pass : CheckStatus::DocumentedViolation;
  } else {
    r.status = CheckStatus::Fail;
  }
  return r;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  os << text;
  if (!os) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

Vector read_vec(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) config_error(std::string(key) + " must be an array");
  try {
    return j.at(key).get<Vector>();
  } catch (const json::exception&) {
    config_error(std::string(key) + " must hold numbers");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

Box read_box(const json& j) {
  if (!j.is_object()) config_error("box must be an object with lower/upper");
  try {
    return Box(read_vec(j, "lower"), read_vec(j, "upper"));
  } catch (const Error& e) {
    config_error(e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  const std::size_t d = objective_dimension(objective);
  if (repeats < 1) config_error("repeats must be >= 1");
  if (solver == SolverKind::Zogd) {
    if (!std::holds_alternative<NoisyQuadratic>(objective) &&
        !std::holds_alternative<UserAnalytic>(objective)) {
      config_error("zogd requires a NoisyQuadratic or UserAnalytic objective");
    }
    if (zogd.steps < 1) config_error("zogd.steps must be >= 1");
    if (d != 0 && zogd.x0.size() != d) config_error("zogd.x0 must have dimension " + std::to_string(d));
    if (!std::holds_alternative<NoisyQuadratic>(objective) && (!zogd.gamma || !zogd.tau)) {
      config_error("gamma and tau are required unless the objective is a NoisyQuadratic");
    }
    return;
  }
  if (!box) config_error(to_string(solver) + " requires a box");
  if (d != 0 && box->dimension() != d) {
    config_error("box dimension " + std::to_string(box->dimension()) + " does not match objective dimension " +
                 std::to_string(d));
  }
  if (!(epsilon > 0.0)) config_error("epsilon must be positive");
  if (std::holds_alternative<NoisyQuadratic>(objective) &&
      std::get<NoisyQuadratic>(objective).sigma > 0.0) {
    config_error("BBS-family solvers need a deterministic objective (sigma = 0)");
  }
  switch (solver) {
    case SolverKind::Bbs:
      if (box->dimension() != 1) config_error("bbs runs on a 1-D interval");
      break;
    case SolverKind::MultiBbs:
      if (!(alpha > 1.0)) config_error("alpha must be > 1");
      if (box->dimension() > 3 && !force) {
        config_error("multibbs grids grow as (n+1)^d; refusing d > 3 without --force");
      }
      break;
    case SolverKind::DirBbs:
      if (box->dimension() < 2) config_error("dirbbs requires d >= 2");
      if (n_points < 15) config_error("n_points must be >= 15");
      break;
    case SolverKind::Zogd: break;
  }
  try {
    good.validate();
  } catch (const Error& e) {
    if (solver != SolverKind::DirBbs) config_error(e.what());
  }
}

ExperimentConfig experiment_from_json(const json& doc) {
  if (!doc.is_object()) config_error("config must be a JSON object");
  if (doc.contains("schema") && doc.at("schema") != kSummarySchema) config_error("unsupported schema");
  ExperimentConfig c;
  c.name = get_or<std::string>(doc, "name", "run");
  if (!doc.contains("objective")) config_error("missing \"objective\"");
  try {
    c.objective = objective_from_json(doc.at("objective"));
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (!doc.contains("solver") || !doc.at("solver").is_object()) config_error("missing \"solver\" object");
  const json& s = doc.at("solver");
  const auto kind = get_or<std::string>(s, "kind", "");
  if (kind == "bbs") {
    c.solver = SolverKind::Bbs;
  } else if (kind == "multibbs") {
    c.solver = SolverKind::MultiBbs;
  } else if (kind == "dirbbs") {
    c.solver = SolverKind::DirBbs;
  } else if (kind == "zogd") {
    c.solver = SolverKind::Zogd;
  } else {
    config_error("solver.kind must be one of bbs, multibbs, dirbbs, zogd");
  }
  if (doc.contains("box")) c.box = read_box(doc.at("box"));
  c.epsilon = get_or<double>(s, "epsilon", c.epsilon);
  c.good.mu = get_or<double>(s, "mu", c.good.mu);
  c.good.big_l = get_or<double>(s, "L", c.good.big_l);
  c.alpha = get_or<double>(s, "alpha", c.alpha);
  c.n_points = get_or<std::size_t>(s, "n_points", c.n_points);
  c.longest_edge_first = get_or<bool>(s, "longest_edge_first", false);
  c.exec = get_or<bool>(s, "parallel", false) ? Execution::Parallel : Execution::Serial;
  if (c.solver == SolverKind::Zogd) {
    c.zogd.steps = get_or<std::size_t>(s, "steps", c.zogd.steps);
    if (s.contains("gamma")) c.zogd.gamma = get_or<double>(s, "gamma", 0.0);
    if (s.contains("tau")) c.zogd.tau = get_or<double>(s, "tau", 0.0);
    c.zogd.x0 = read_vec(s, "x0");
  }
  c.output_path = get_or<std::string>(doc, "output_path", (default_output_dir() / c.name).string());
  if (doc.contains("seed")) {
    c.seed = get_or<std::uint64_t>(doc, "seed", 0);
    c.objective = with_seed(c.objective, c.seed);
  } else {
    c.seed = get_or<std::uint64_t>(doc.at("objective"), "seed", 0);
  }
  c.repeats = get_or<std::size_t>(doc, "repeats", 1);
  c.force = get_or<bool>(doc, "force", false);
  c.validate();
  return c;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  prepare_dir(config.output_path);

  RunSummary summary;
  summary.name = config.name;
  summary.csv_path = config.output_path / "trace.csv";
  summary.json_path = config.output_path / "summary.json";
  json extra;

  if (config.solver == SolverKind::Zogd) {
    OracleHandle handle(config.objective);
    const auto x_star = handle.known_minimizer();
    if (!x_star) config_error("zogd runs need a known minimizer for distance tracking");
    const double dist0_sq = distance_sq(config.zogd.x0, *x_star);

    double mu = 0.0;
    double big_l = 0.0;
    double sigma = 0.0;
    double delta = 0.0;
    if (const auto* q = std::get_if<NoisyQuadratic>(&config.objective)) {
      std::tie(mu, big_l) = spectrum_bounds(*q);
      sigma = q->sigma;
      delta = q->delta_bound;
    }
    const std::size_t d = config.zogd.x0.size();
    StepSizes sizes;
    if (!config.zogd.gamma || !config.zogd.tau) {
      sizes = corollary3_schedule(d, big_l, mu, sigma, config.zogd.steps, dist0_sq);
    }
    ZogdConfig zc;
    zc.steps = config.zogd.steps;
    zc.gamma = Schedule::constant(config.zogd.gamma.value_or(sizes.gamma));
    zc.tau = Schedule::constant(config.zogd.tau.value_or(sizes.tau));
    zc.seed = config.seed;

    const ZogdTrace trace = zogd_run(handle, config.zogd.x0, zc, x_star);
    std::vector<double> mean_curve = trace.distances_sq;
    std::uint64_t replica_calls = trace.total_calls;
    if (config.repeats > 1) {
      const ZogdEnsemble ens =
          zogd_ensemble(config.objective, config.zogd.x0, zc, *x_star, config.repeats, config.exec);
      mean_curve = ens.mean_distance_sq;
      replica_calls = ens.calls_per_replica;
    }
    std::ostringstream csv;
    write_zogd_csv(csv, trace, config.repeats > 1 ? &mean_curve : nullptr);
    write_text(summary.csv_path, csv.str());

    summary.final_point = trace.points.back();
    summary.final_value = clean_value(config.objective, summary.final_point);
    summary.iterations = trace.steps.size();
    summary.total_oracle_calls = replica_calls * config.repeats;

    const std::uint64_t expected_calls = 2 * static_cast<std::uint64_t>(zc.steps);
    summary.checks.push_back(make_check("call_accounting",
                                        trace.total_calls == expected_calls && replica_calls == expected_calls,
                                        0.0, "2 calls per step"));
    summary.checks.push_back(make_check("trace_length", trace.points.size() == zc.steps + 1, 0.0));
    if (mu > 0.0 && delta == 0.0 && zc.steps >= 10) {
      const double gamma = zc.gamma.at(0);
      if (sigma > 0.0) {
        const Plateau p = detect_plateau(mean_curve);
        const double floor = zogd_noise_floor(d, gamma, sigma, mu);
        summary.checks.push_back(make_check("plateau_reached", p.reached, 0.1 - p.drift,
                                            "tail drift " + format_double(p.drift)));
        summary.checks.push_back(make_check("plateau_within_10x_floor", p.level <= 10.0 * floor,
                                            10.0 * floor - p.level,
                                            "tail mean " + format_double(p.level) + ", floor " +
                                                format_double(floor)));
        extra["plateau"] = {{"level", p.level}, {"drift", p.drift}, {"reached", p.reached},
                            {"floor", floor}};
      } else if (gamma <= 1.0 / (5.0 * static_cast<double>(d) * big_l) && config.repeats > 1) {
        const double bound = zogd_mean_bound(d, gamma, 0.0, mu, zc.steps, dist0_sq);
        summary.checks.push_back(make_check("mean_contraction", mean_curve.back() <= 1.1 * bound,
                                            1.1 * bound - mean_curve.back()));
      }
    }
    extra["gamma"] = zc.gamma.at(0);
    extra["tau"] = zc.tau.at(0);
    extra["repeats"] = config.repeats;
    extra["final_mean_distance_sq"] = mean_curve.back();
  } else {
    OracleHandle handle(config.objective);
    RunTrace trace;
    switch (config.solver) {
      case SolverKind::Bbs: {
        BbsConfig bc{config.epsilon, config.good, config.exec};
        trace = bbs_1d(handle, config.box->lower()[0], config.box->upper()[0], bc);
        break;
      }
      case SolverKind::MultiBbs: {
        MultiBbsConfig mc;
        mc.epsilon = config.epsilon;
        mc.params = config.good;
        mc.alpha = config.alpha;
        mc.exec = config.exec;
        trace = multi_bbs(handle, *config.box, mc);
        break;
      }
      case SolverKind::DirBbs: {
        DirectionBbsConfig dc;
        dc.epsilon = config.epsilon;
        dc.n_points = config.n_points;
        dc.longest_edge_first = config.longest_edge_first;
        dc.exec = config.exec;
        trace = direction_bbs(handle, *config.box, dc);
        break;
      }
      case SolverKind::Zogd: break;
    }
    const auto x_star = handle.known_minimizer();
    std::ostringstream csv;
    write_run_trace_csv(csv, trace, x_star);
    write_text(summary.csv_path, csv.str());

    summary.final_point = trace.final_point;
    summary.final_value = clean_value(config.objective, trace.final_point);
    summary.iterations = trace.iterations.size();
    summary.total_oracle_calls = trace.total_calls;
    summary.checks = trace_checks(trace, config, x_star);
    extra["grid_n"] = trace.grid_n;
  }

  for (const auto& spec : config.class_checks) summary.checks.push_back(run_class_check(spec, config));

  summary.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  json doc = summary_to_json(summary);
  doc["solver"] = to_string(config.solver);
  doc["seed"] = config.seed;
  try {
    doc["objective"] = objective_to_json(config.objective);
  } catch (const Error&) {
    doc["objective"] = {{"variant", variant_name(config.objective)}};
  }
  doc["details"] = extra;
  summary.details = extra;
  write_text(summary.json_path, doc.dump(2) + "\n");
  return summary;
}

json summary_to_json(const RunSummary& s) {
  json checks = json::array();
  for (const auto& c : s.checks) {
    checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"margin", c.margin}, {"note", c.note}});
  }
  return {{"schema", kSummarySchema},
          {"name", s.name},
          {"final_point", s.final_point},
          {"final_value", s.final_value},
          {"total_oracle_calls", s.total_oracle_calls},
          {"iterations", s.iterations},
          {"wall_time_ms", s.wall_time_ms},
          {"csv_path", s.csv_path.string()},
          {"invariant_check_results", checks}};
}

ClassReport verify_class_cmd(const json& doc) {
  if (!doc.is_object()) config_error("verify-class config must be a JSON object");
  if (!doc.contains("objective")) config_error("missing \"objective\"");
  if (!doc.contains("box")) config_error("missing \"box\"");
  if (!doc.contains("class") || !doc.at("class").is_object()) config_error("missing \"class\" object");
  ObjectiveSpec spec;
  try {
    spec = objective_from_json(doc.at("objective"));
  } catch (const Error& e) {
    config_error(e.what());
  }
  const Box box = read_box(doc.at("box"));
  OracleHandle handle(spec);
  Vector x_star;
  if (doc.contains("x_star")) {
    x_star = read_vec(doc, "x_star");
  } else if (auto known = handle.known_minimizer()) {
    x_star = *known;
  } else {
    config_error("x_star is required for this objective");
  }
  if (x_star.size() != box.dimension()) config_error("x_star and box differ in dimension");
  const auto grid_n = get_or<std::size_t>(doc, "grid_n", 100);
  const json& cls = doc.at("class");
  const auto kind = get_or<std::string>(cls, "kind", "");
  try {
    if (kind == "good") {
      GoodClassParams p{get_or<double>(cls, "mu", 1.0), get_or<double>(cls, "L", 1.0)};
      return verify_good_class(handle, box, p, x_star, grid_n);
    }
    if (kind == "very_good") {
      const double big_m = get_or<double>(cls, "big_m", 1.0);
      if (box.dimension() < 2) config_error("the very good class needs d >= 2");
      VeryGoodClassParams p = VeryGoodClassParams::with_max_delta(big_m, box.dimension());
      p.delta_bound = get_or<double>(cls, "delta_bound", p.delta_bound);
      return verify_very_good_class(handle, box, p, x_star, grid_n);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::DimensionTooSmall) {
      config_error(e.what());
    }
    throw;
  }
  config_error("class.kind must be \"good\" or \"very_good\"");
}

fs::path default_output_dir() {
  if (const char* env = std::getenv("ZEROOPT_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return "out";
}

json read_json_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) config_error("cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    config_error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace zeroopt
