// zeroopt command line: run configs, presets and class checks.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "zeroopt/errors.hpp"
#include "zeroopt/harness.hpp"
#include "zeroopt/trace_io.hpp"

using namespace zeroopt;

namespace {

void print_summary(const RunSummary& s) {
  std::cout << s.name << ": iterations=" << s.iterations << " calls=" << s.total_oracle_calls
            << " f=" << format_double(s.final_value) << " time_ms=" << format_double(s.wall_time_ms) << '\n';
  for (const auto& c : s.checks) {
    std::cout << "  [" << to_string(c.status) << "] " << c.name;
    if (!c.note.empty()) std::cout << " (" << c.note << ')';
    std::cout << '\n';
  }
  std::cout << "  -> " << s.json_path.string() << '\n';
}

int checks_exit(const std::vector<RunSummary>& runs) {
  for (const auto& r : runs) {
    if (!r.all_checks_ok()) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid-shrinking and zeroth-order optimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t repeats = 0;
  bool force = false;

  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("config", config_path, "config file")->required();
  auto* run_seed = run->add_option("--seed", seed, "override the seed");
  auto* run_out = run->add_option("--out", out_dir, "output directory");
  auto* run_rep = run->add_option("--repeats", repeats, "replicas for stochastic runs");
  run->add_flag("--force", force, "allow multibbs with d > 3");

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "run a built-in experiment");
  preset->add_option("name", preset_name, "preset name (see list-presets)")->required();
  preset->add_option("--out", out_dir, "output directory");
  preset->add_option("--seed", seed, "seed");
  preset->add_flag("--force", force, "allow multibbs with d > 3");

  auto* verify = app.add_subcommand("verify-class", "grid check of a function-class inequality");
  verify->add_option("config", config_path, "config file")->required();

  auto* list = app.add_subcommand("list-presets", "print the preset registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      for (const auto& p : list_presets()) std::cout << p.name << "\t" << p.description << '\n';
      return 0;
    }
    if (*run) {
      auto doc = read_json_file(config_path);
      if (*run_seed) doc["seed"] = seed;
      if (*run_rep) doc["repeats"] = repeats;
      if (force) doc["force"] = true;
      if (*run_out) doc["output_path"] = out_dir;
      const auto config = experiment_from_json(doc);
      const auto summary = run_experiment(config);
      print_summary(summary);
      return checks_exit({summary});
    }
    if (*preset) {
      const auto dir = out_dir.empty() ? default_output_dir() : std::filesystem::path(out_dir);
      const auto runs = run_preset(preset_name, dir, seed, force);
      for (const auto& s : runs) print_summary(s);
      return checks_exit(runs);
    }
    if (*verify) {
      const auto report = verify_class_cmd(read_json_file(config_path));
      std::cout << (report.holds ? "holds" : "violated") << ": " << report.points_checked
                << " points, worst margin " << format_double(report.worst_margin) << '\n';
      constexpr std::size_t shown = 20;
      for (std::size_t i = 0; i < report.violations.size() && i < shown; ++i) {
        const auto& v = report.violations[i];
        std::cout << "  at (";
        for (std::size_t j = 0; j < v.point.size(); ++j) std::cout << (j ? ", " : "") << format_double(v.point[j]);
        std::cout << ") lower " << format_double(v.lower_margin) << " upper " << format_double(v.upper_margin)
                  << '\n';
      }
      if (report.violations.size() > shown) {
        std::cout << "  ... " << report.violations.size() - shown << " more\n";
      }
      return report.holds ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
