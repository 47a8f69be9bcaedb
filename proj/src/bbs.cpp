#include "zeroopt/bbs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zeroopt/errors.hpp"

namespace zeroopt {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must be positive and finite");
  }
}

void check_handle_dimension(const OracleHandle& handle, std::size_t d) {
  if (handle.dimension() != 0 && handle.dimension() != d) {
    throw Error(ErrorKind::DimensionMismatch, "objective has dimension " +
                                                  std::to_string(handle.dimension()) +
                                                  ", box has " + std::to_string(d));
  }
}

std::size_t ceil_to_size(double x) { return static_cast<std::size_t>(std::ceil(x)); }

[[noreturn]] void iteration_cap(const std::string& solver, std::size_t cap) {
  throw Error(ErrorKind::BudgetExceeded,
              solver + " did not terminate within " + std::to_string(cap) + " iterations");
}

}  // namespace

std::size_t bbs_grid_size(const GoodClassParams& params) {
  params.validate();
  return 2 * ceil_to_size(std::sqrt(params.big_l / params.mu));
}

std::size_t multi_bbs_grid_size(std::size_t d, const GoodClassParams& params, double alpha) {
  params.validate();
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must be > 1");
  }
  const double base = std::ceil(std::sqrt(static_cast<double>(d) * params.big_l / params.mu));
  return ceil_to_size(alpha * base);
}

RunTrace bbs_1d(OracleHandle& handle, double lo, double hi, const BbsConfig& config) {
  check_epsilon(config.epsilon);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw Error(ErrorKind::InvalidInterval, "need finite lo < hi");
  }
  check_handle_dimension(handle, 1);

  const std::size_t n = bbs_grid_size(config.params);
  const double nd = static_cast<double>(n);
  const double quarter = nd / 4.0;

  RunTrace trace;
  trace.solver = "bbs";
  trace.initial_box = Box({lo}, {hi});
  trace.grid_n = n;

  double b = lo;
  double big_b = hi;
  while (big_b - b >= 2.0 * config.epsilon) {
    if (trace.iterations.size() == config.max_iterations) iteration_cap("bbs", config.max_iterations);
    const double h = (big_b - b) / nd;
    const std::uint64_t before = handle.call_count();
    const ArgminResult best = evaluate_argmin(
        handle, n + 1, 1,
        [b, big_b, h](std::size_t i, std::span<double> x) {
          x[0] = std::min(big_b, b + static_cast<double>(i) * h);
        },
        config.exec);
    const double i_star = static_cast<double>(best.index);
    // Both bounds come from the pre-update (b, B).
    const auto [new_b, new_big_b] = shrink_edge(b, big_b, b + i_star * h, quarter * h);

    IterationRecord rec;
    rec.index = trace.iterations.size() + 1;
    rec.box_before = Box({b}, {big_b});
    rec.box_after = Box({new_b}, {new_big_b});
    rec.incumbent = {std::min(big_b, b + i_star * h)};
    rec.incumbent_value = best.value;
    rec.oracle_calls_this_iter = handle.call_count() - before;
    trace.total_calls += rec.oracle_calls_this_iter;
    trace.iterations.push_back(std::move(rec));

    if (new_b == b && new_big_b == big_b) break;  // below floating-point resolution
    b = new_b;
    big_b = new_big_b;
  }
  trace.final_point = {0.5 * (b + big_b)};
  return trace;
}

RunTrace multi_bbs(OracleHandle& handle, const Box& box, const MultiBbsConfig& config) {
  check_epsilon(config.epsilon);
  const std::size_t d = box.dimension();
  if (d == 0) throw Error(ErrorKind::InvalidBox, "empty box");
  check_handle_dimension(handle, d);

  const std::size_t n = multi_bbs_grid_size(d, config.params, config.alpha);
  const double half_cells = static_cast<double>(n) / (2.0 * config.alpha);

  RunTrace trace;
  trace.solver = "multibbs";
  trace.initial_box = box;
  trace.grid_n = n;

  Box current = box;
  while (diameter(current) >= config.epsilon) {
    if (trace.iterations.size() == config.max_iterations) {
      iteration_cap("multibbs", config.max_iterations);
    }
    const GridSpec grid = build_grid(current, n);
    const std::size_t count = grid.total_points();
    if (trace.total_calls + count > config.max_calls) {
      throw Error(ErrorKind::BudgetExceeded, "multibbs would exceed the cap of " +
                                                 std::to_string(config.max_calls) +
                                                 " oracle calls");
    }
    const std::uint64_t before = handle.call_count();
    const ArgminResult best = evaluate_argmin(
        handle, count, d, [&grid](std::size_t k, std::span<double> x) { grid.point(k, x); },
        config.exec);
    const Vector p = grid.point(best.index);
    const double half_width = half_cells * grid.step;

    Vector lower(d);
    Vector upper(d);
    for (std::size_t j = 0; j < d; ++j) {
      std::tie(lower[j], upper[j]) =
          shrink_edge(current.lower()[j], current.upper()[j], p[j], half_width);
    }
    Box next(std::move(lower), std::move(upper));

    IterationRecord rec;
    rec.index = trace.iterations.size() + 1;
    rec.box_before = current;
    rec.box_after = next;
    rec.incumbent = p;
    rec.incumbent_value = best.value;
    rec.oracle_calls_this_iter = handle.call_count() - before;
    trace.total_calls += rec.oracle_calls_this_iter;
    trace.iterations.push_back(std::move(rec));

    const bool stalled = next == current;
    current = std::move(next);
    if (stalled) break;
  }
  trace.final_point = center(current);
  return trace;
}

RunTrace direction_bbs(OracleHandle& handle, const Box& box, const DirectionBbsConfig& config) {
  check_epsilon(config.epsilon);
  const std::size_t d = box.dimension();
  if (d < 2) {
    throw Error(ErrorKind::DimensionTooSmall, "direction_bbs needs d >= 2; use bbs_1d for d = 1");
  }
  if (config.n_points < 15) {
    throw Error(ErrorKind::InvalidArgument, "n_points must be >= 15");
  }
  if (config.class_params) {
    config.class_params->validate();
    if (config.class_params->d != d) {
      throw Error(ErrorKind::DimensionMismatch, "class_params.d differs from the box dimension");
    }
  }
  check_handle_dimension(handle, d);

  const std::size_t n = config.n_points;
  const double nd = static_cast<double>(n);

  RunTrace trace;
  trace.solver = "dirbbs";
  trace.initial_box = box;
  trace.grid_n = n;

  Vector lower = box.lower();
  Vector upper = box.upper();
  Vector m = center(box);
  while (distance(upper, lower) >= 2.0 * config.epsilon) {
    if (trace.iterations.size() == config.max_iterations) {
      iteration_cap("dirbbs", config.max_iterations);
    }
    const Box before_box(lower, upper);
    const std::uint64_t before = handle.call_count();
    double last_value = 0.0;

    for (std::size_t step = 0; step < d; ++step) {
      std::size_t axis = step;
      double longest = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double e = upper[j] - lower[j];
        if (e > longest) {
          longest = e;
          if (config.longest_edge_first) axis = j;
        }
      }
      const double lo = lower[axis];
      const double hi = upper[axis];
      const double h = (hi - lo) / nd;
      const ArgminResult best = evaluate_argmin(
          handle, n + 1, d,
          [&m, axis, lo, hi, h](std::size_t j, std::span<double> x) {
            std::copy(m.begin(), m.end(), x.begin());
            x[axis] = std::min(hi, lo + static_cast<double>(j) * h);
          },
          config.exec);
      m[axis] = std::min(hi, lo + static_cast<double>(best.index) * h);
      std::tie(lower[axis], upper[axis]) = shrink_edge(lo, hi, m[axis], longest / 3.0);
      last_value = best.value;
    }

    IterationRecord rec;
    rec.index = trace.iterations.size() + 1;
    rec.box_before = before_box;
    rec.box_after = Box(lower, upper);
    rec.incumbent = m;
    rec.incumbent_value = last_value;
    rec.oracle_calls_this_iter = handle.call_count() - before;
    trace.total_calls += rec.oracle_calls_this_iter;
    const bool stalled = rec.box_after == rec.box_before;
    trace.iterations.push_back(std::move(rec));
    if (stalled) break;
  }
  trace.final_point = center(Box(lower, upper));
  return trace;
}

std::size_t required_iterations(const Box& initial_box, double epsilon, double contraction) {
  check_epsilon(epsilon);
  if (!(contraction > 1.0)) throw Error(ErrorKind::InvalidArgument, "contraction must be > 1");
  const double start = std::sqrt(static_cast<double>(initial_box.dimension())) * max_edge(initial_box);
  if (start <= epsilon) return 0;
  const auto fits = [&](std::size_t t) {
    return start / std::pow(contraction, static_cast<double>(t)) <= epsilon;
  };
  auto t = static_cast<std::size_t>(std::max(0.0, std::ceil(std::log(start / epsilon) / std::log(contraction))));
  while (t > 0 && fits(t - 1)) --t;
  while (!fits(t)) ++t;
  return t;
}

}  // namespace zeroopt
