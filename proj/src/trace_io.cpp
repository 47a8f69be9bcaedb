#include "zeroopt/trace_io.hpp"

#include <cstdio>

namespace zeroopt {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_run_trace_csv(std::ostream& os, const RunTrace& trace,
                         const std::optional<Vector>& x_star) {
  os << "index,max_edge,diameter,incumbent_value,distance_to_xstar,cumulative_calls\n";
  std::uint64_t cumulative = 0;
  for (const auto& rec : trace.iterations) {
    cumulative += rec.oracle_calls_this_iter;
    os << rec.index << ',' << format_double(max_edge(rec.box_after)) << ','
       << format_double(diameter(rec.box_after)) << ',' << format_double(rec.incumbent_value) << ',';
    if (x_star) os << format_double(distance(center(rec.box_after), *x_star));
    os << ',' << cumulative << '\n';
  }
}

nlohmann::json run_trace_summary(const RunTrace& trace) {
  return {{"schema", kSummarySchema},
          {"solver", trace.solver},
          {"grid_n", trace.grid_n},
          {"final_point", trace.final_point},
          {"total_calls", trace.total_calls},
          {"iterations", trace.iterations.size()}};
}

void write_zogd_csv(std::ostream& os, const ZogdTrace& trace,
                    const std::vector<double>* mean_distance_sq) {
  os << "step,distance_sq,grad_norm,cumulative_calls";
  if (mean_distance_sq) os << ",mean_distance_sq";
  os << '\n';
  std::uint64_t cumulative = 0;
  for (std::size_t k = 0; k < trace.points.size(); ++k) {
    os << k << ',';
    if (k < trace.distances_sq.size()) os << format_double(trace.distances_sq[k]);
    os << ',';
    if (k > 0) {
      os << format_double(trace.steps[k - 1].gradient_estimate_norm);
      cumulative += trace.steps[k - 1].oracle_calls;
    }
    os << ',' << cumulative;
    if (mean_distance_sq) os << ',' << format_double((*mean_distance_sq)[k]);
    os << '\n';
  }
}

nlohmann::json zogd_summary(const ZogdTrace& trace) {
  nlohmann::json j = {{"schema", kSummarySchema},
                      {"final_point", trace.points.back()},
                      {"total_calls", trace.total_calls},
                      {"steps", trace.steps.size()}};
  if (!trace.distances_sq.empty()) j["final_distance_sq"] = trace.distances_sq.back();
  return j;
}

}  // namespace zeroopt
