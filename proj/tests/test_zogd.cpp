#include <doctest.h>

#include <cmath>

#include "zeroopt/errors.hpp"
#include "zeroopt/zogd.hpp"

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

NoisyQuadratic identity2() { return make_diagonal_quadratic({1.0, 1.0}, {0.0, 0.0}, 0.0, 0.0, 0); }

}  // namespace

TEST_CASE("sample_sphere") {
  Rng rng(1);
  int plus = 0;
  for (int i = 0; i < 10'000; ++i) {
    const Vector e = sample_sphere(1, rng);
    REQUIRE(std::abs(e[0]) == 1.0);
    plus += e[0] > 0.0;
  }
  CHECK(plus >= 4700);
  CHECK(plus <= 5300);

  constexpr int n = 50'000;
  constexpr std::size_t d = 7;
  Vector m(d, 0.0);
  Vector m2(d, 0.0);
  for (int i = 0; i < n; ++i) {
    const Vector e = sample_sphere(d, rng);
    CHECK(std::abs(norm(e) - 1.0) <= 1e-12);
    for (std::size_t j = 0; j < d; ++j) {
      m[j] += e[j];
      m2[j] += e[j] * e[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    // Var[e_j] = 1/d
    CHECK(std::abs(m[j] / n) < 5.0 * std::sqrt(1.0 / d / n));
    CHECK(m2[j] / n == doctest::Approx(1.0 / d).epsilon(0.03));
  }
  CHECK(kind_of([&] { sample_sphere(0, rng); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("grad_estimate with a forced direction") {
  OracleHandle h(identity2());
  Rng rng(0);
  const Vector x{1.0, 0.0};
  const Vector e1{1.0, 0.0};
  const Vector e2{0.0, 1.0};
  Vector g = grad_estimate(h, x, 0.1, rng, std::span<const double>(e2));
  CHECK(std::abs(g[0]) < 1e-15);
  CHECK(std::abs(g[1]) < 1e-15);
  g = grad_estimate(h, x, 0.1, rng, std::span<const double>(e1));
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(g[1] == 0.0);
  CHECK(h.call_count() == 4);

  // anisotropic: d <A(x - x*), e> e for any tau, since the central difference
  // of a quadratic is exact
  auto q = make_diagonal_quadratic({1.0, 10.0, 100.0}, {0.5, -0.5, 2.0}, 0.0, 0.0, 0);
  OracleHandle hq(q);
  const Vector x3{1.0, 1.0, 1.0};
  const Vector e{0.6, 0.0, 0.8};
  const double slope = 0.6 * (1.0 * 0.5) + 0.8 * (100.0 * -1.0);
  for (double tau : {1e-3, 0.5, 3.0}) {
    g = grad_estimate(hq, x3, tau, rng, std::span<const double>(e));
    CHECK(g[0] == doctest::Approx(3.0 * slope * 0.6).epsilon(1e-9));
    CHECK(g[1] == 0.0);
    CHECK(g[2] == doctest::Approx(3.0 * slope * 0.8).epsilon(1e-9));
  }
  CHECK(kind_of([&] { grad_estimate(hq, x3, 0.0, rng); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("grad_estimate is unbiased for the noisy quadratic gradient") {
  constexpr std::size_t d = 6;
  auto q = make_diagonal_quadratic(log_spaced_spectrum(d, 1.0, 20.0), Vector(d, 0.0), 0.5, 0.0, 19);
  OracleHandle h(q);
  Rng rng(3);
  const Vector x{1.0, -1.0, 0.5, 2.0, -0.3, 0.1};
  constexpr int n = 100'000;
  Vector s(d, 0.0);
  Vector s2(d, 0.0);
  for (int i = 0; i < n; ++i) {
    const Vector g = grad_estimate(h, x, 0.3, rng);
    for (std::size_t j = 0; j < d; ++j) {
      s[j] += g[j];
      s2[j] += g[j] * g[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double mean = s[j] / n;
    const double se = std::sqrt((s2[j] / n - mean * mean) / n);
    const double truth = q.matrix_a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) * x[j];
    CAPTURE(j);
    CHECK(std::abs(mean - truth) < 5.0 * se);
  }
  CHECK(h.call_count() == 2u * n);
}

TEST_CASE("schedules") {
  const Schedule c = Schedule::constant(0.5);
  CHECK(c.at(0) == 0.5);
  CHECK(c.at(1'000'000) == 0.5);
  const Schedule p = Schedule::per_step({1.0, 0.5, 0.25});
  CHECK(p.at(2) == 0.25);
  CHECK_NOTHROW(p.validate(3, "gamma"));
  CHECK(kind_of([&] { p.validate(4, "gamma"); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Schedule::constant(0.0).validate(1, "tau"); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Schedule::per_step({1.0, -1.0}).validate(2, "tau"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("zogd_run bookkeeping and reproducibility") {
  auto q = make_diagonal_quadratic({1.0, 3.0, 9.0}, {1.0, 1.0, 1.0}, 0.2, 0.0, 4);
  ZogdConfig cfg;
  cfg.steps = 500;
  cfg.gamma = Schedule::constant(0.005);
  cfg.tau = Schedule::constant(0.1);
  cfg.seed = 12;
  OracleHandle a(q);
  const ZogdTrace t = zogd_run(a, {4.0, -2.0, 0.0}, cfg, q.x_star);
  CHECK(t.points.size() == 501);
  CHECK(t.steps.size() == 500);
  CHECK(t.distances_sq.size() == 501);
  CHECK(t.total_calls == 1000);
  CHECK(a.call_count() == 1000);
  for (const auto& s : t.steps) CHECK(s.oracle_calls == 2);
  CHECK(t.distances_sq[0] == doctest::Approx(9.0 + 9.0 + 1.0));
  CHECK(t.distances_sq.back() < 0.5);

  OracleHandle b(q);
  const ZogdTrace u = zogd_run(b, {4.0, -2.0, 0.0}, cfg, q.x_star);
  CHECK(u.points == t.points);

  OracleHandle c(q);
  const ZogdTrace no_star = zogd_run(c, {4.0, -2.0, 0.0}, cfg);
  CHECK(no_star.distances_sq.empty());
  CHECK(no_star.points == t.points);
}

TEST_CASE("zogd_run per-step schedules and guards") {
  OracleHandle h(identity2());
  ZogdConfig cfg;
  cfg.steps = 3;
  cfg.gamma = Schedule::per_step({0.1, 0.1});
  CHECK(kind_of([&] { zogd_run(h, {1.0, 1.0}, cfg); }) == ErrorKind::InvalidArgument);
  cfg.gamma = Schedule::constant(1e6);  // blows up
  cfg.steps = 200;
  CHECK(kind_of([&] { zogd_run(h, {1.0, 1.0}, cfg); }) == ErrorKind::NonFiniteValue);
  cfg.gamma = Schedule::constant(0.1);
  CHECK(kind_of([&] { zogd_run(h, {1.0, 1.0, 1.0}, cfg); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("noise-free isotropic zogd never moves away from x*") {
  // with A = I and gamma <= 1/(5dL) each step is x - gamma d <x, e> e, a
  // contraction along e
  constexpr std::size_t d = 5;
  OracleHandle h(make_diagonal_quadratic(Vector(d, 1.0), Vector(d, 0.0), 0.0, 0.0, 0));
  ZogdConfig cfg;
  cfg.steps = 300;  // stays far above the rounding floor of the differences
  cfg.gamma = Schedule::constant(1.0 / (5.0 * d));
  cfg.tau = Schedule::constant(0.01);
  const ZogdTrace t = zogd_run(h, Vector(d, 2.0), cfg, Vector(d, 0.0));
  for (std::size_t k = 1; k < t.distances_sq.size(); ++k) {
    CHECK(t.distances_sq[k] <= t.distances_sq[k - 1] * (1.0 + 1e-12));
  }
  CHECK(t.distances_sq.back() > 1e-20);
}

TEST_CASE("ensemble matches independent single runs") {
  auto q = make_diagonal_quadratic({1.0, 4.0}, {0.0, 0.0}, 1.0, 0.0, 100);
  ZogdConfig cfg;
  cfg.steps = 300;
  cfg.gamma = Schedule::constant(0.01);
  cfg.tau = Schedule::constant(0.2);
  cfg.seed = 7;
  const Vector x0{3.0, 3.0};
  const auto ens_s = zogd_ensemble(q, x0, cfg, q.x_star, 5, Execution::Serial);
  const auto ens_p = zogd_ensemble(q, x0, cfg, q.x_star, 5, Execution::Parallel);
  CHECK(ens_s.mean_distance_sq == ens_p.mean_distance_sq);
  CHECK(ens_s.calls_per_replica == 600);
  CHECK(ens_s.repeats == 5);

  std::vector<double> manual(cfg.steps + 1, 0.0);
  for (std::uint64_t r = 0; r < 5; ++r) {
    NoisyQuadratic qr = q;
    qr.seed = q.seed + r;
    ZogdConfig cr = cfg;
    cr.seed = cfg.seed + r;
    OracleHandle h(qr);
    const auto t = zogd_run(h, x0, cr, q.x_star);
    for (std::size_t k = 0; k < manual.size(); ++k) manual[k] += t.distances_sq[k] / 5.0;
  }
  for (std::size_t k = 0; k < manual.size(); ++k) {
    CHECK(ens_s.mean_distance_sq[k] == doctest::Approx(manual[k]).epsilon(1e-12));
  }
}

TEST_CASE("corollary3_schedule") {
  auto s = corollary3_schedule(50, 100.0, 1.0, 1.0, 1000, 1.0);
  CHECK(s.tau == doctest::Approx(1.0));
  s = corollary3_schedule(2, 1.0, 1.0, 0.0, 1000, 1.0);
  CHECK(s.gamma == doctest::Approx(0.1));
  CHECK(s.tau == kTauFloor);
  // 1/(5dL) = 4e-5; ratio mu^2 dist0^2 K / (20 d^2 sigma^2) = 2e5 and
  // 2 ln(2e5)/1e6 = 2.44e-5 is the smaller term
  s = corollary3_schedule(50, 100.0, 1.0, 1.0, 1'000'000, 1e4);
  CHECK(s.gamma == doctest::Approx(2.4412145291060347e-05).epsilon(1e-12));
  s = corollary3_schedule(50, 100.0, 1.0, 1.0, 10'000'000, 1e4);
  CHECK(s.gamma == doctest::Approx(2.901731547704844e-06).epsilon(1e-12));
  // few steps: the cap binds
  s = corollary3_schedule(50, 100.0, 1.0, 1.0, 10'000, 1e4);
  CHECK(s.gamma == doctest::Approx(4e-5).epsilon(1e-12));
  // ratio 0.5 < 2, so the log argument is floored at 2
  s = corollary3_schedule(1, 1.0, 1.0, 1.0, 100, 0.1);
  CHECK(s.gamma == doctest::Approx(0.013862943611198906).epsilon(1e-12));
}

TEST_CASE("theorem3_rhs") {
  TheoremThreeParams p;
  p.d = 50;
  p.mu = 1.0;
  p.big_l = 100.0;
  p.gamma = 2e-4;
  p.tau = 1.0;
  p.sigma = 0.0;
  CHECK(theorem3_rhs(100.0, 10.0, p) == doctest::Approx((1.0 - 2e-4) * 100.0));
  p.sigma = 1.0;
  CHECK(theorem3_rhs(100.0, 10.0, p) == doctest::Approx(100.0305).epsilon(1e-14));
  p.gamma = 0.0;
  CHECK(theorem3_rhs(100.0, 10.0, p) == 100.0);

  TheoremThreeParams w;
  w.d = 10;
  w.mu = 2.0;
  w.big_l = 10.0;
  w.gamma = 1e-3;
  w.tau = 0.5;
  w.sigma = 2.0;
  w.delta_bound = 0.3;
  CHECK(theorem3_rhs(9.0, 3.0, w) == doctest::Approx(9.099665000000002).epsilon(1e-13));
  w.mu = 20.0;  // mu > L
  CHECK(kind_of([&] { theorem3_rhs(1.0, 1.0, w); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("noise floor and contraction bound") {
  CHECK(zogd_noise_floor(50, 2e-4, 1.0, 1.0) == doctest::Approx(5.0));
  CHECK(zogd_mean_bound(10, 2e-4, 0.0, 1.0, 2000, 10.0) ==
        doctest::Approx(std::pow(1.0 - 1e-4, 2000) * 10.0).epsilon(1e-13));
}

TEST_CASE("detect_plateau") {
  const std::vector<double> flat(100, 3.0);
  auto p = detect_plateau(flat);
  CHECK(p.level == 3.0);
  CHECK(p.drift == 0.0);
  CHECK(p.reached);
  std::vector<double> decay(100);
  for (std::size_t k = 0; k < decay.size(); ++k) decay[k] = std::pow(0.9, static_cast<double>(k));
  p = detect_plateau(decay);
  CHECK_FALSE(p.reached);
  CHECK(kind_of([] { detect_plateau(std::vector<double>(5, 1.0)); }) == ErrorKind::InvalidArgument);
}
