#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "zeroopt/geometry.hpp"
#include "zeroopt/kernels.hpp"
#include "zeroopt/oracles.hpp"
#include "zeroopt/random.hpp"

namespace zeroopt {

/// Constant or per-step positive parameter.
class Schedule {
 public:
  Schedule() = default;
  static Schedule constant(double value);
  static Schedule per_step(std::vector<double> values);

  /// Value at 0-based step k. A per-step schedule must cover every step.
  double at(std::size_t k) const;
  bool is_constant() const noexcept { return values_.size() == 1 && constant_; }
  void validate(std::size_t steps, const char* name) const;

 private:
  std::vector<double> values_;
  bool constant_ = true;
};

struct ZogdConfig {
  std::size_t steps = 1;
  Schedule gamma = Schedule::constant(1e-3);
  Schedule tau = Schedule::constant(1e-3);
  std::uint64_t seed = 0;
  /// Iterates with norm above this abort the run with NonFiniteValue.
  double divergence_limit = 1e12;
};

struct ZogdStep {
  double gradient_estimate_norm = 0.0;
  std::uint64_t oracle_calls = 0;
};

struct ZogdTrace {
  std::vector<Vector> points;        // K + 1 iterates, points[0] == x0
  std::vector<ZogdStep> steps;       // K records
  std::vector<double> distances_sq;  // K + 1 entries when x* is known, else empty
  std::uint64_t total_calls = 0;
};

struct TheoremThreeParams {
  std::size_t d = 1;
  double mu = 1.0;
  double big_l = 1.0;
  double sigma = 0.0;
  double delta_bound = 0.0;
  double gamma = 0.0;
  double tau = 1.0;

  void validate() const;
};

/// Uniform direction on the unit sphere S^{d-1} (normalized Gaussian).
Vector sample_sphere(std::size_t d, Rng& rng);

/// (d / 2 tau) (f(x + tau e) - f(x - tau e)) e with two separate oracle calls,
/// so each side sees its own noise draw. `forced_direction` replaces the
/// sampled e; it exists for deterministic tests.
Vector grad_estimate(OracleHandle& handle, std::span<const double> x, double tau, Rng& rng,
                     std::optional<std::span<const double>> forced_direction = std::nullopt);

/// Unconstrained gradient descent driven by grad_estimate; exactly two oracle
/// calls per step. Directions come from the config seed's own stream.
ZogdTrace zogd_run(OracleHandle& handle, Vector x0, const ZogdConfig& config,
                   std::optional<Vector> x_star = std::nullopt);

/// Seed-averaged curves over `repeats` independent replicas. Replica r uses
/// objective seed spec.seed + r and direction seed config.seed + r.
struct ZogdEnsemble {
  std::vector<double> mean_distance_sq;  // K + 1
  std::vector<double> mean_grad_norm;    // K
  std::size_t repeats = 0;
  std::uint64_t calls_per_replica = 0;
};

ZogdEnsemble zogd_ensemble(const ObjectiveSpec& spec, const Vector& x0, const ZogdConfig& config,
                           const Vector& x_star, std::size_t repeats, Execution exec);

/// Copy of `spec` with its seed replaced (variants without a seed are unchanged).
ObjectiveSpec with_seed(const ObjectiveSpec& spec, std::uint64_t seed);

struct StepSizes {
  double gamma = 0.0;
  double tau = 0.0;
};

inline constexpr double kTauFloor = 1e-3;

/// gamma = min{1/(5dL), 2 ln(max{2, mu^2 |x0-x*|^2 K / (20 d^2 sigma^2)}) / (mu K)}
/// (just 1/(5dL) when sigma = 0) and tau = max(sqrt(2 d sigma^2 / (mu L)), 1e-3).
StepSizes corollary3_schedule(std::size_t d, double big_l, double mu, double sigma,
                              std::size_t steps, double dist0_sq);

/// Upper bound on E|x_{k+1} - x*|^2 given E|x_k - x*|^2 = dist_sq and
/// E|x_k - x*| = dist.
double theorem3_rhs(double dist_sq, double dist, const TheoremThreeParams& p);

/// Residual level 10 d^2 gamma sigma^2 / mu of constant-step runs.
double zogd_noise_floor(std::size_t d, double gamma, double sigma, double mu);

/// (1 - gamma mu / 2)^K dist0_sq + zogd_noise_floor(...).
double zogd_mean_bound(std::size_t d, double gamma, double sigma, double mu, std::size_t steps,
                        double dist0_sq);

/// Tail statistics of a convergence curve: `level` is the mean over the last
/// 20% of entries; `drift` compares the last 10% with the 10% before it,
/// relative to `level`. The curve has reached its plateau when drift <= 0.1.
struct Plateau {
  double level = 0.0;
  double drift = 0.0;
  bool reached = false;
};

Plateau detect_plateau(const std::vector<double>& curve);

}  // namespace zeroopt
