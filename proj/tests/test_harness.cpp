#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "zeroopt/errors.hpp"
#include "zeroopt/harness.hpp"
#include "zeroopt/trace_io.hpp"

using namespace zeroopt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "zeroopt_test_harness" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no zeroopt::Error thrown");
  return ErrorKind::InvalidArgument;
}

json svg_run(const fs::path& out) {
  return json{{"schema", 1},
              {"name", "svg"},
              {"objective", {{"variant", "SyntheticVeryGood"}, {"params", {{"x_star", {1.0, -2.0, 0.5}}}}, {"seed", 3}}},
              {"solver", {{"kind", "dirbbs"}, {"epsilon", 1e-5}}},
              {"box", {{"lower", {-5, -5, -5}}, {"upper", {5, 5, 5}}}},
              {"output_path", out.string()}};
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("run trace CSV layout") {
  RunTrace t;
  t.solver = "multibbs";
  t.initial_box = Box({0.0, 0.0}, {4.0, 4.0});
  IterationRecord r;
  r.index = 1;
  r.box_before = t.initial_box;
  r.box_after = Box({1.0, 1.0}, {3.0, 2.0});
  r.incumbent = {2.0, 1.5};
  r.incumbent_value = 0.25;
  r.oracle_calls_this_iter = 25;
  t.iterations.push_back(r);
  t.total_calls = 25;
  std::ostringstream with;
  write_run_trace_csv(with, t, Vector{2.0, 1.5});
  CHECK(with.str() ==
        "index,max_edge,diameter,incumbent_value,distance_to_xstar,cumulative_calls\n"
        "1,2,2.2360679774997898,0.25,0,25\n");
  std::ostringstream without;
  write_run_trace_csv(without, t, std::nullopt);
  CHECK(without.str().find("0.25,,25\n") != std::string::npos);
}

TEST_CASE("zogd CSV layout") {
  ZogdTrace t;
  t.points = {{1.0}, {0.5}};
  t.steps = {{2.0, 2}};
  t.distances_sq = {1.0, 0.25};
  t.total_calls = 2;
  std::ostringstream os;
  const std::vector<double> mean{1.0, 0.3};
  write_zogd_csv(os, t, &mean);
  CHECK(os.str() ==
        "step,distance_sq,grad_norm,cumulative_calls,mean_distance_sq\n"
        "0,1,,0,1\n"
        "1,0.25,2,2,0.29999999999999999\n");
}

TEST_CASE("experiment JSON parsing and validation") {
  const auto out = scratch("parse");
  const auto c = experiment_from_json(svg_run(out));
  CHECK(c.solver == SolverKind::DirBbs);
  CHECK(c.box->dimension() == 3);
  CHECK(c.epsilon == 1e-5);
  CHECK(c.seed == 3);

  auto bad = svg_run(out);
  bad["solver"]["kind"] = "simplex";
  CHECK(kind_of([&] { experiment_from_json(bad); }) == ErrorKind::ConfigError);
  bad = svg_run(out);
  bad["box"]["lower"] = {-5, -5};
  CHECK(kind_of([&] { experiment_from_json(bad); }) == ErrorKind::ConfigError);
  bad = svg_run(out);
  bad["box"]["upper"] = {5, 5, -6};
  CHECK(kind_of([&] { experiment_from_json(bad); }) == ErrorKind::ConfigError);
  bad = svg_run(out);
  bad["solver"]["epsilon"] = "tiny";
  CHECK(kind_of([&] { experiment_from_json(bad); }) == ErrorKind::ConfigError);
  bad = svg_run(out);
  bad["objective"]["params"]["delta_bound"] = 100.0;  // above M / (16 (d-1))
  CHECK(kind_of([&] { experiment_from_json(bad); }) == ErrorKind::ConfigError);
  bad = svg_run(out);
  bad["solver"]["n_points"] = 10;
  CHECK(kind_of([&] { experiment_from_json(bad); }) == ErrorKind::ConfigError);
  bad = svg_run(out);
  bad["solver"] = {{"kind", "multibbs"}, {"mu", 20.0}, {"L", 21.0}};
  CHECK_NOTHROW(experiment_from_json(bad));
  bad["box"] = {{"lower", {-1, -1, -1, -1}}, {"upper", {1, 1, 1, 1}}};
  bad["objective"]["params"]["x_star"] = {0, 0, 0, 0};
  CHECK(kind_of([&] { experiment_from_json(bad); }) == ErrorKind::ConfigError);  // d > 3
  bad["force"] = true;
  CHECK_NOTHROW(experiment_from_json(bad));
  CHECK(kind_of([] { experiment_from_json(json::array()); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { read_json_file("/nonexistent/zeroopt.json"); }) == ErrorKind::ConfigError);
}

TEST_CASE("run_experiment writes reproducible outputs") {
  const auto out_a = scratch("repro_a");
  const auto out_b = scratch("repro_b");
  const auto sa = run_experiment(experiment_from_json(svg_run(out_a)));
  const auto sb = run_experiment(experiment_from_json(svg_run(out_b)));
  CHECK(fs::exists(sa.csv_path));
  CHECK(fs::exists(sa.json_path));
  CHECK(slurp(sa.csv_path) == slurp(sb.csv_path));
  CHECK(sa.all_checks_ok());
  CHECK(distance(sa.final_point, Vector{1.0, -2.0, 0.5}) <= 1e-5);
  CHECK(sa.total_oracle_calls == 48 * sa.iterations);

  const json doc = json::parse(slurp(sa.json_path));
  CHECK(doc.at("schema") == 1);
  CHECK(doc.at("solver") == "dirbbs");
  std::set<std::string> names;
  for (const auto& c : doc.at("invariant_check_results")) {
    names.insert(c.at("name").get<std::string>());
    CHECK(c.at("status") == "pass");
  }
  for (const char* n : {"contraction", "call_accounting", "solution_retention", "iteration_bound"}) {
    CHECK(names.count(n) == 1);
  }

  // a different seed changes the ripple and therefore the trace
  auto other = svg_run(scratch("repro_c"));
  other["seed"] = 4;
  const auto sc = run_experiment(experiment_from_json(other));
  CHECK(slurp(sc.csv_path) != slurp(sa.csv_path));
}

TEST_CASE("zogd runs pick the noise-free schedule from the spectrum") {
  const auto out = scratch("zogd");
  json doc{{"name", "zq"},
           {"objective",
            {{"variant", "NoisyQuadratic"},
             {"params", {{"matrix_a", {{1.0, 0.0}, {0.0, 10.0}}}, {"x_star", {0.0, 0.0}}, {"sigma", 0.0}}}}},
           {"solver", {{"kind", "zogd"}, {"steps", 400}, {"x0", {1.0, 1.0}}}},
           {"repeats", 4},
           {"output_path", out.string()}};
  const auto s = run_experiment(experiment_from_json(doc));
  CHECK(s.iterations == 400);
  CHECK(s.total_oracle_calls == 4 * 800);
  CHECK(s.details.at("gamma").get<double>() == doctest::Approx(1.0 / (5.0 * 2 * 10.0)));
  CHECK(s.all_checks_ok());
  bool contraction_checked = false;
  for (const auto& c : s.checks) contraction_checked = contraction_checked || c.name == "mean_contraction";
  CHECK(contraction_checked);
  const std::string csv = slurp(s.csv_path);
  CHECK(csv.rfind("step,distance_sq,grad_norm,cumulative_calls,mean_distance_sq\n", 0) == 0);

  doc["solver"]["kind"] = "bbs";
  CHECK(kind_of([&] { experiment_from_json(doc); }) == ErrorKind::ConfigError);
}

TEST_CASE("preset registry") {
  const auto presets = list_presets();
  CHECK(presets.size() >= 7);
  std::set<std::string> names;
  for (const auto& p : presets) names.insert(p.name);
  CHECK(names.size() == presets.size());
  for (const char* n : {"fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig7", "theorem-suite"}) {
    CHECK(names.count(n) == 1);
  }
  const auto fig4 = preset_experiments("fig4", "out", 0);
  REQUIRE(fig4.size() == 1);
  const auto* svg = std::get_if<SyntheticVeryGood>(&fig4[0].objective);
  REQUIRE(svg != nullptr);
  CHECK(svg->x_star.size() == 2);
  CHECK(preset_experiments("fig3a", "out", 0).size() == 4);
  CHECK(preset_experiments("fig7", "out", 0).size() == 6);
  CHECK(kind_of([] { preset_experiments("fig9", "out", 0); }) == ErrorKind::ConfigError);
}

TEST_CASE("fig3a preset passes except the documented class check") {
  const auto runs = run_preset("fig3a", scratch("fig3a"), 0, false);
  REQUIRE(runs.size() == 4);
  int documented = 0;
  for (const auto& r : runs) {
    CHECK(r.all_checks_ok());
    for (const auto& c : r.checks) documented += c.status == CheckStatus::DocumentedViolation;
    CHECK(std::abs(r.final_point[0] - 2.0) <= 1e-6);
  }
  CHECK(documented == 1);
}

TEST_CASE("verify_class_cmd") {
  json doc{{"objective",
            {{"variant", "NoisyQuadratic"},
             {"params", {{"matrix_a", {{2.0, 0.0}, {0.0, 8.0}}}, {"x_star", {0.0, 1.0}}, {"sigma", 0.0}}}}},
           {"box", {{"lower", {-1, -1}}, {"upper", {1, 2}}}},
           {"class", {{"kind", "good"}, {"mu", 2.0}, {"L", 8.0}}},
           {"grid_n", 40}};
  CHECK(verify_class_cmd(doc).holds);
  doc["class"]["L"] = 7.5;
  CHECK_FALSE(verify_class_cmd(doc).holds);
  doc["class"] = {{"kind", "very_good"}, {"big_m", 5.0}};
  CHECK_FALSE(verify_class_cmd(doc).holds);
  doc["class"] = {{"kind", "fancy"}};
  CHECK(kind_of([&] { verify_class_cmd(doc); }) == ErrorKind::ConfigError);
  doc.erase("box");
  CHECK(kind_of([&] { verify_class_cmd(doc); }) == ErrorKind::ConfigError);
}
