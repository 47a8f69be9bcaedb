#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "zeroopt/bbs.hpp"
#include "zeroopt/kernels.hpp"
#include "zeroopt/oracles.hpp"
#include "zeroopt/zogd.hpp"

namespace zeroopt {

enum class SolverKind { Bbs, MultiBbs, DirBbs, Zogd };

std::string to_string(SolverKind kind);

/// Grid check of a function-class inequality attached to an experiment.
/// `expect_hold == false` marks a known, documented violation.
struct ClassCheckSpec {
  enum class Kind { Good, VeryGood };
  std::string name;
  Kind kind = Kind::Good;
  GoodClassParams good;
  VeryGoodClassParams very_good;
  std::size_t grid_n = 100;
  bool expect_hold = true;
  std::string note;
};

struct ZogdSettings {
  std::size_t steps = 1000;
  std::optional<double> gamma;  // empty: derived from d, L, mu, sigma, K
  std::optional<double> tau;    // empty: derived smoothing radius
  Vector x0;
};

struct ExperimentConfig {
  std::string name = "run";
  ObjectiveSpec objective = OscillatingParabola{};
  SolverKind solver = SolverKind::MultiBbs;
  std::optional<Box> box;

  double epsilon = 1e-6;
  GoodClassParams good;
  double alpha = 2.0;
  std::size_t n_points = 15;
  bool longest_edge_first = false;
  ZogdSettings zogd;

  std::filesystem::path output_path = "out/run";
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  bool force = false;
  Execution exec = Execution::Serial;
  std::vector<ClassCheckSpec> class_checks;

  /// Solver/objective compatibility; throws ConfigError.
  void validate() const;
};

enum class CheckStatus { Pass, Fail, DocumentedViolation };

std::string to_string(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double margin = 0.0;  // >= 0 when satisfied, larger is safer
  std::string note;
};

struct RunSummary {
  std::string name;
  Vector final_point;
  double final_value = 0.0;
  std::uint64_t total_oracle_calls = 0;
  std::size_t iterations = 0;
  double wall_time_ms = 0.0;
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
  std::vector<CheckResult> checks;
  nlohmann::json details = nlohmann::json::object();  // solver-specific extras

  /// True when every check passed or is a documented violation.
  bool all_checks_ok() const;
};

/// Parses a run document. CLI-style overrides are applied afterwards by the
/// caller. Throws ConfigError.
ExperimentConfig experiment_from_json(const nlohmann::json& doc);

/// Runs the solver, writes <output_path>/trace.csv and summary.json, and
/// evaluates the applicable invariant checks.
RunSummary run_experiment(const ExperimentConfig& config);

nlohmann::json summary_to_json(const RunSummary& summary);

/// verify-class document: {"objective", "box", "class": {"kind": "good"|"very_good", ...},
/// "x_star"?, "grid_n"?}.
ClassReport verify_class_cmd(const nlohmann::json& doc);

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> list_presets();

/// Builds the experiments for a preset. Throws ConfigError for an unknown name.
std::vector<ExperimentConfig> preset_experiments(const std::string& name,
                                                 const std::filesystem::path& out_dir,
                                                 std::uint64_t seed);

/// Runs a preset end to end ("theorem-suite" included).
std::vector<RunSummary> run_preset(const std::string& name, const std::filesystem::path& out_dir,
                                   std::uint64_t seed, bool force);

/// Default output directory: $ZEROOPT_OUTPUT_DIR or "out".
std::filesystem::path default_output_dir();

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace zeroopt
