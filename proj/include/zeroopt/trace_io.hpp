#pragma once

#include <json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "zeroopt/bbs.hpp"
#include "zeroopt/zogd.hpp"

namespace zeroopt {

inline constexpr int kSummarySchema = 1;

/// Shortest round-trip-safe decimal form ("%.17g").
std::string format_double(double v);

// RunTrace CSV columns, one row per iteration:
//   index, max_edge, diameter, incumbent_value, distance_to_xstar, cumulative_calls
// max_edge and diameter describe box_after; distance_to_xstar is the distance
// from the box center to x* and is left empty when x* is unknown.
void write_run_trace_csv(std::ostream& os, const RunTrace& trace,
                         const std::optional<Vector>& x_star);

/// {"schema": 1, "solver", "grid_n", "final_point", "total_calls", "iterations"}
nlohmann::json run_trace_summary(const RunTrace& trace);

// ZogdTrace CSV columns, one row per step starting at step 0 (x0):
//   step, distance_sq, grad_norm, cumulative_calls [, mean_distance_sq]
// grad_norm is empty on step 0. mean_distance_sq is appended when a
// seed-averaged curve is supplied.
void write_zogd_csv(std::ostream& os, const ZogdTrace& trace,
                    const std::vector<double>* mean_distance_sq = nullptr);

/// {"schema": 1, "final_point", "total_calls", "steps", "final_distance_sq"?}
nlohmann::json zogd_summary(const ZogdTrace& trace);

}  // namespace zeroopt
