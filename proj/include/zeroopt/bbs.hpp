#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zeroopt/geometry.hpp"
#include "zeroopt/kernels.hpp"
#include "zeroopt/oracles.hpp"

namespace zeroopt {

struct BbsConfig {
  double epsilon = 1e-6;
  GoodClassParams params;
  Execution exec = Execution::Serial;
  std::size_t max_iterations = 10'000;
};

struct MultiBbsConfig {
  double epsilon = 1e-6;
  GoodClassParams params;
  double alpha = 2.0;
  Execution exec = Execution::Serial;
  std::uint64_t max_calls = 100'000'000;
  std::size_t max_iterations = 10'000;
};

struct DirectionBbsConfig {
  double epsilon = 1e-6;
  /// Line-search resolution; values below 15 void the contraction guarantee.
  std::size_t n_points = 15;
  /// Always refine the currently longest edge instead of sweeping axes in order.
  bool longest_edge_first = false;
  /// Only checked for consistency with the box; the solver does not use it.
  std::optional<VeryGoodClassParams> class_params;
  Execution exec = Execution::Serial;
  std::size_t max_iterations = 10'000;
};

struct IterationRecord {
  std::size_t index = 0;  // 1-based
  Box box_before;
  Box box_after;
  Vector incumbent;
  double incumbent_value = 0.0;
  std::uint64_t oracle_calls_this_iter = 0;
};

struct RunTrace {
  std::string solver;
  Box initial_box;
  std::size_t grid_n = 0;
  std::vector<IterationRecord> iterations;
  Vector final_point;
  std::uint64_t total_calls = 0;
};

/// n = 2 ceil(sqrt(L / mu)).
std::size_t bbs_grid_size(const GoodClassParams& params);
/// n = ceil(alpha * ceil(sqrt(d L / mu))).
std::size_t multi_bbs_grid_size(std::size_t d, const GoodClassParams& params, double alpha);

/// One-dimensional grid shrinking on [lo, hi]. Each iteration evaluates n + 1
/// equispaced points and keeps a window of half-width (B - b)/4 around the best
/// one, clipped to the current interval. Stops once B - b < 2 epsilon.
RunTrace bbs_1d(OracleHandle& handle, double lo, double hi, const BbsConfig& config);

/// Grid shrinking on a box. The grid step is max_edge/n on every axis and the
/// next box has half-width max_edge/(2 alpha) around the incumbent, so the
/// longest edge contracts by at least alpha. Stops once |B - b| < epsilon.
RunTrace multi_bbs(OracleHandle& handle, const Box& box, const MultiBbsConfig& config);

/// Coordinate-wise line searches with n + 1 points each; every outer iteration
/// costs exactly d (n + 1) calls and shrinks the longest edge by 3/2.
/// Stops once |B - b| < 2 epsilon. Requires d >= 2.
RunTrace direction_bbs(OracleHandle& handle, const Box& box, const DirectionBbsConfig& config);

/// Smallest T with sqrt(d) max_edge(box) / contraction^T <= epsilon.
std::size_t required_iterations(const Box& initial_box, double epsilon, double contraction);

}  // namespace zeroopt
