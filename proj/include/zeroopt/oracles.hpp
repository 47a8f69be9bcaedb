#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "zeroopt/geometry.hpp"
#include "zeroopt/random.hpp"

namespace zeroopt {

/// Sandwich constants: mu/2 |x-x*|^2 <= f(x) - f* <= L/2 |x-x*|^2.
struct GoodClassParams {
  double mu = 1.0;
  double big_l = 1.0;

  void validate() const;
};

/// f(x) - f* = (M/2 + delta(x)) |x-x*|^2 with |delta| <= delta_bound.
struct VeryGoodClassParams {
  double big_m = 1.0;
  std::size_t d = 2;
  double delta_bound = 0.0;

  /// delta_bound = M / (16 (d - 1)); requires d >= 2.
  static VeryGoodClassParams with_max_delta(double big_m, std::size_t d);
  void validate() const;
};

/// 10 (x-2)^2 - 4 cos(17 (x-2)) + 4 on the line; minimum at x = 2.
struct OscillatingParabola {};

/// Two-dimensional Levy-type function with f(3.7, 1.3) = 0.
struct Levy2D {};

/// (M/2 + delta(x)) |x - x*|^2 with delta(x) uniform on [-delta_bound, delta_bound],
/// drawn once per distinct point.
struct SyntheticVeryGood {
  double big_m = 20.0;
  Vector x_star;
  double delta_bound = 0.0;
  std::uint64_t seed = 0;
};

enum class NoiseKind { Gaussian, Uniform };

/// 1/2 (x-x*)^T A (x-x*) + (xi + delta(x)) |x - x*| with fresh xi per call.
struct NoisyQuadratic {
  Eigen::MatrixXd matrix_a;
  Vector x_star;
  double sigma = 0.0;
  double delta_bound = 0.0;
  std::uint64_t seed = 0;
  NoiseKind noise = NoiseKind::Gaussian;
};

/// Caller-supplied black box. `dim == 0` accepts any dimension. Grid
/// evaluation is parallelized only when `thread_safe` is set.
struct UserAnalytic {
  std::function<double(std::span<const double>)> fn;
  std::optional<Vector> known_x_star;
  std::size_t dim = 0;
  bool thread_safe = false;
  std::string name = "user";
};

using ObjectiveSpec =
    std::variant<OscillatingParabola, Levy2D, SyntheticVeryGood, NoisyQuadratic, UserAnalytic>;

std::string variant_name(const ObjectiveSpec& spec);

/// Throws InvalidArgument on any broken invariant (non-symmetric or indefinite
/// A, delta_bound above M/(16(d-1)), d < 2 for the very good class, ...).
void validate(const ObjectiveSpec& spec);

SyntheticVeryGood make_synthetic_very_good(double big_m, Vector x_star, std::uint64_t seed);
NoisyQuadratic make_diagonal_quadratic(const Vector& spectrum, Vector x_star, double sigma,
                                       double delta_bound, std::uint64_t seed);
/// |x - x*|^2 (c/2 + rho (1 - cos(omega sum_i (x_i - x*_i))) / 2): a parabola
/// with a bounded multiplicative ripple, in the good class with mu = c and
/// L = c + 2 rho. Thread-safe.
UserAnalytic rippled_quadratic(Vector x_star, double c, double rho, double omega);

/// Eigenvalues log-spaced between mu and big_l (inclusive).
Vector log_spaced_spectrum(std::size_t d, double mu, double big_l);

/// Seeded, call-counting evaluator. The only way solvers see f.
///
/// Single owner: the counter and the noise stream are mutated by eval().
/// Deterministic variants also expose a const, thread-safe value() so grids
/// can be evaluated in parallel; the caller then books the calls with
/// add_calls().
class OracleHandle {
 public:
  explicit OracleHandle(ObjectiveSpec spec);

  double eval(std::span<const double> x);

  /// Pure evaluation without noise or accounting. Throws InvalidArgument for
  /// stochastic objectives.
  double value(std::span<const double> x) const;

  bool deterministic() const noexcept;
  bool parallel_safe() const noexcept;

  std::uint64_t call_count() const noexcept { return calls_; }
  void reset_counter() noexcept { calls_ = 0; }
  void add_calls(std::uint64_t n) noexcept { calls_ += n; }

  /// Required input dimension; 0 when any dimension is accepted.
  std::size_t dimension() const noexcept;
  std::optional<Vector> known_minimizer() const;
  const ObjectiveSpec& spec() const noexcept { return spec_; }

  /// delta(x) as realized for this point (0 for variants without one).
  double realized_delta(std::span<const double> x) const;

 private:
  void check_dimension(std::span<const double> x) const;
  double evaluate(std::span<const double> x, double xi) const;
  double draw_xi();

  ObjectiveSpec spec_;
  Rng noise_rng_;
  std::uint64_t delta_seed_ = 0;
  std::uint64_t calls_ = 0;
  bool diagonal_a_ = false;
};

struct ClassViolation {
  Vector point;
  double lower_margin = 0.0;  // negative when the lower bound is broken
  double upper_margin = 0.0;  // negative when the upper bound is broken
};

struct ClassReport {
  bool holds = true;
  std::size_t points_checked = 0;
  std::vector<ClassViolation> violations;
  /// min over points of min(lower_margin, upper_margin).
  double worst_margin = 0.0;
};

ClassReport verify_good_class(OracleHandle& handle, const Box& box, const GoodClassParams& params,
                              std::span<const double> x_star, std::size_t grid_n);

/// Checks |(f(x) - f*)/|x-x*|^2 - M/2| <= delta_bound at grid points with
/// |x - x*| > 1e-9.
ClassReport verify_very_good_class(OracleHandle& handle, const Box& box,
                                   const VeryGoodClassParams& params,
                                   std::span<const double> x_star, std::size_t grid_n);

}  // namespace zeroopt
