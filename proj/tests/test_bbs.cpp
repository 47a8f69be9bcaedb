#include <doctest.h>

#include <cmath>

#include "zeroopt/bbs.hpp"
#include "zeroopt/errors.hpp"
#include "zeroopt/random.hpp"

using namespace zeroopt;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no zeroopt::Error thrown");
  return ErrorKind::InvalidArgument;
}

bool retains(const RunTrace& t, const Vector& x_star) {
  for (const auto& rec : t.iterations) {
    if (!rec.box_after.contains(x_star, 1e-12)) return false;
  }
  return true;
}

// lattice size per axis, counted independently of build_grid
std::uint64_t expected_grid_calls(const Box& b, std::size_t n) {
  const double step = max_edge(b) / static_cast<double>(n);
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < b.dimension(); ++j) {
    std::uint64_t k = 0;
    while (k < n && static_cast<double>(k + 1) * step <= b.edge(j) + 1e-9 * step) ++k;
    total *= k + 1;
  }
  return total;
}

}  // namespace

TEST_CASE("grid sizes") {
  CHECK(bbs_grid_size({10.0, 600.0}) == 16);   // 2 ceil(sqrt 60)
  CHECK(bbs_grid_size({1.0, 4.0}) == 4);       // exact root
  CHECK(multi_bbs_grid_size(1, {10.0, 600.0}, 1.5) == 12);
  CHECK(multi_bbs_grid_size(1, {10.0, 600.0}, 2.0) == 16);
  CHECK(multi_bbs_grid_size(1, {10.0, 600.0}, 3.0) == 24);
  CHECK(multi_bbs_grid_size(1, {10.0, 600.0}, 4.0) == 32);
  CHECK(multi_bbs_grid_size(2, {1.0, 150.0}, 2.0) == 36);  // ceil(sqrt 300) = 18
  CHECK(kind_of([] { multi_bbs_grid_size(2, {1.0, 150.0}, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { bbs_grid_size({2.0, 1.0}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("required_iterations") {
  const Box seg({0.0}, {6.5});
  CHECK(required_iterations(seg, 1e-6, 1.5) == 39);
  CHECK(required_iterations(seg, 1e-6, 2.0) == 23);
  CHECK(required_iterations(seg, 1e-6, 3.0) == 15);
  CHECK(required_iterations(seg, 1e-6, 4.0) == 12);
  CHECK(required_iterations(Box::cube(2, -10, 10), 1e-4, 2.0) == 19);
  CHECK(required_iterations(Box::cube(10, -10, 10), 2e-4, 1.5) == 32);
  CHECK(required_iterations(Box::cube(100, -10, 10), 2e-4, 1.5) == 35);
  CHECK(required_iterations(Box::cube(1, 0, 1), 2.0, 2.0) == 0);
  CHECK(required_iterations(Box::cube(1, 0, 8), 1.0, 2.0) == 3);  // exact power
}

TEST_CASE("bbs_1d on an in-class oscillating parabola") {
  OracleHandle h(OscillatingParabola{});
  BbsConfig cfg;
  cfg.epsilon = 1e-6;
  cfg.params = {10.0, 1200.0};
  const RunTrace t = bbs_1d(h, 0.0, 6.5, cfg);
  CHECK(t.solver == "bbs");
  CHECK(t.grid_n == 2 * 11);
  CHECK(std::abs(t.final_point[0] - 2.0) <= 1e-6);
  CHECK(retains(t, {2.0}));
  CHECK(t.iterations.size() <= required_iterations(t.initial_box, 2e-6, 2.0));
  std::uint64_t sum = 0;
  for (const auto& rec : t.iterations) {
    CHECK(rec.oracle_calls_this_iter == t.grid_n + 1);
    CHECK(max_edge(rec.box_after) <= max_edge(rec.box_before) / 2.0);
    CHECK(rec.box_before.contains(rec.box_after));
    sum += rec.oracle_calls_this_iter;
  }
  CHECK(sum == t.total_calls);
  CHECK(h.call_count() == t.total_calls);
  CHECK(max_edge(t.iterations.back().box_after) < 2e-6);
}

TEST_CASE("bbs_1d errors") {
  OracleHandle h(OscillatingParabola{});
  CHECK(kind_of([&] { bbs_1d(h, 1.0, 1.0, {}); }) == ErrorKind::InvalidInterval);
  CHECK(kind_of([&] { bbs_1d(h, 0.0, NAN, {}); }) == ErrorKind::InvalidInterval);
  BbsConfig bad;
  bad.epsilon = 0.0;
  CHECK(kind_of([&] { bbs_1d(h, 0.0, 1.0, bad); }) == ErrorKind::InvalidArgument);
  BbsConfig capped;
  capped.epsilon = 1e-9;
  capped.max_iterations = 3;
  CHECK(kind_of([&] { bbs_1d(h, 0.0, 1.0, capped); }) == ErrorKind::BudgetExceeded);
  OracleHandle levy(Levy2D{});
  CHECK(kind_of([&] { bbs_1d(levy, 0.0, 1.0, {}); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("multi_bbs fig3a configuration") {
  for (double alpha : {1.5, 2.0, 3.0, 4.0}) {
    OracleHandle h(OscillatingParabola{});
    MultiBbsConfig cfg;
    cfg.epsilon = 1e-6;
    cfg.params = {10.0, 600.0};
    cfg.alpha = alpha;
    const RunTrace t = multi_bbs(h, Box({0.0}, {6.5}), cfg);
    CHECK(std::abs(t.final_point[0] - 2.0) <= 1e-6);
    CHECK(t.iterations.size() <= required_iterations(t.initial_box, 1e-6, alpha));
    for (const auto& rec : t.iterations) {
      CHECK(max_edge(rec.box_after) / max_edge(rec.box_before) <= (1.0 + 1e-12) / alpha);
      CHECK(rec.oracle_calls_this_iter == expected_grid_calls(rec.box_before, t.grid_n));
    }
  }
}

TEST_CASE("multi_bbs serial and parallel traces match") {
  MultiBbsConfig cfg;
  cfg.epsilon = 1e-4;
  cfg.params = {1.0, 150.0};
  cfg.exec = Execution::Serial;
  OracleHandle a(Levy2D{});
  const RunTrace s = multi_bbs(a, Box::cube(2, -10, 10), cfg);
  cfg.exec = Execution::Parallel;
  OracleHandle b(Levy2D{});
  const RunTrace p = multi_bbs(b, Box::cube(2, -10, 10), cfg);
  REQUIRE(s.iterations.size() == p.iterations.size());
  for (std::size_t i = 0; i < s.iterations.size(); ++i) {
    CHECK(s.iterations[i].box_after == p.iterations[i].box_after);
    CHECK(s.iterations[i].incumbent == p.iterations[i].incumbent);
  }
  CHECK(s.final_point == p.final_point);
  CHECK(a.call_count() == b.call_count());
  CHECK(distance(s.final_point, Vector{3.7, 1.3}) < 1e-3);
}

TEST_CASE("multi_bbs retention on in-class rippled quadratics, uneven boxes") {
  Rng rng(2024);
  for (int inst = 0; inst < 40; ++inst) {
    const std::size_t d = inst % 3 == 0 ? 3 : 2;
    Vector lo(d);
    Vector hi(d);
    Vector xs(d);
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = rng.uniform(-10.0, 0.0);
      hi[j] = lo[j] + rng.uniform(1.0, 12.0);
      xs[j] = rng.uniform(lo[j], hi[j]);
    }
    const double c = rng.uniform(0.5, 4.0);
    const double rho = rng.uniform(0.0, 10.0);
    OracleHandle h(rippled_quadratic(xs, c, rho, rng.uniform(0.5, 6.0)));
    MultiBbsConfig cfg;
    cfg.epsilon = 1e-6;
    cfg.params = {c, c + 2.0 * rho};
    cfg.alpha = 1.5 + rng.uniform01() * 2.5;
    const RunTrace t = multi_bbs(h, Box(lo, hi), cfg);
    CAPTURE(inst);
    CHECK(retains(t, xs));
    CHECK(distance(t.final_point, xs) <= 1e-6);
  }
}

TEST_CASE("multi_bbs guards") {
  OracleHandle h(Levy2D{});
  MultiBbsConfig cfg;
  cfg.params = {1.0, 150.0};
  cfg.max_calls = 5000;
  cfg.epsilon = 1e-4;
  CHECK(kind_of([&] { multi_bbs(h, Box::cube(2, -10, 10), cfg); }) == ErrorKind::BudgetExceeded);
  cfg.max_calls = 100'000'000;
  CHECK(kind_of([&] { multi_bbs(h, Box::cube(3, -10, 10), cfg); }) == ErrorKind::DimensionMismatch);
  // (n+1)^d for d = 8 exceeds the default cap before any evaluation
  OracleHandle q(rippled_quadratic(Vector(8, 0.0), 1.0, 0.0, 1.0));
  CHECK(kind_of([&] { multi_bbs(q, Box::cube(8, -1, 1), cfg); }) == ErrorKind::BudgetExceeded);
  CHECK(q.call_count() == 0);
}

TEST_CASE("direction_bbs on synthetic very-good objectives") {
  for (std::size_t d : {2u, 10u, 100u}) {
    const Vector xs = d == 2 ? Vector{1.43, 3.69} : Vector(d, 1.0);
    OracleHandle h(make_synthetic_very_good(20.0, xs, 5));
    DirectionBbsConfig cfg;
    cfg.epsilon = 1e-4;
    const RunTrace t = direction_bbs(h, Box::cube(d, -10, 10), cfg);
    CAPTURE(d);
    CHECK(t.grid_n == 15);
    CHECK(t.iterations.size() <= required_iterations(t.initial_box, 2e-4, 1.5));
    CHECK(retains(t, xs));
    CHECK(distance(t.final_point, xs) <= 1e-4);
    for (const auto& rec : t.iterations) {
      CHECK(rec.oracle_calls_this_iter == 16 * d);
      CHECK(std::log(max_edge(rec.box_before)) - std::log(max_edge(rec.box_after)) >=
            std::log(1.5) - 1e-12);
    }
  }
}

TEST_CASE("direction_bbs longest-edge-first also contracts") {
  const Vector xs{-3.0, 0.5, 7.0};
  OracleHandle h(make_synthetic_very_good(20.0, xs, 8));
  DirectionBbsConfig cfg;
  cfg.epsilon = 1e-6;
  cfg.longest_edge_first = true;
  const RunTrace t = direction_bbs(h, Box({-10, -1, 0}, {10, 2, 9}), cfg);
  CHECK(retains(t, xs));
  CHECK(distance(t.final_point, xs) <= 1e-6);
  for (const auto& rec : t.iterations) {
    CHECK(max_edge(rec.box_after) <= max_edge(rec.box_before) / 1.5 * (1.0 + 1e-12));
    CHECK(rec.oracle_calls_this_iter == 16 * 3);
  }
}

TEST_CASE("direction_bbs errors") {
  OracleHandle one(OscillatingParabola{});
  CHECK(kind_of([&] { direction_bbs(one, Box({0.0}, {1.0}), {}); }) == ErrorKind::DimensionTooSmall);
  OracleHandle h(make_synthetic_very_good(20.0, {0.0, 0.0}, 1));
  DirectionBbsConfig cfg;
  cfg.n_points = 14;
  CHECK(kind_of([&] { direction_bbs(h, Box::cube(2, -1, 1), cfg); }) == ErrorKind::InvalidArgument);
  cfg.n_points = 15;
  cfg.class_params = VeryGoodClassParams::with_max_delta(20.0, 3);
  CHECK(kind_of([&] { direction_bbs(h, Box::cube(2, -1, 1), cfg); }) == ErrorKind::DimensionMismatch);
}
