// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <cmath>

#include "zeroopt/kernels.hpp"
#include "zeroopt/oracles.hpp"
#include "zeroopt/zogd.hpp"

using namespace zeroopt;

namespace {

// Levy function on an (n+1)^2 lattice over [-10, 10]^2
void grid_argmin(benchmark::State& state, Execution exec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double step = 20.0 / static_cast<double>(n);
  const PointFn pts = [n, step](std::size_t k, std::span<double> x) {
    x[0] = -10.0 + step * static_cast<double>(k / (n + 1));
    x[1] = -10.0 + step * static_cast<double>(k % (n + 1));
  };
  const OracleHandle h(Levy2D{});
  const ValueFn f = [&h](std::span<const double> x) { return h.value(x); };
  const std::size_t count = (n + 1) * (n + 1);
  for (auto _ : state) {
    const auto r = exec == Execution::Serial ? argmin_serial(count, 2, pts, f) : argmin_parallel(count, 2, pts, f);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * count));
}

void sphere_moments(benchmark::State& state, Execution exec) {
  const auto d = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t samples = 200'000;
  Vector s(d, 1.0);
  const SampleFn sample = [&](Rng& rng, std::span<double> out) {
    const Vector e = sample_sphere(d, rng);
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += s[i] * e[i];
    for (std::size_t i = 0; i < d; ++i) out[i] = static_cast<double>(d) * dot * e[i];
  };
  for (auto _ : state) {
    const auto m = exec == Execution::Serial ? mc_moments_serial(samples, d, 1, sample)
                                             : mc_moments_parallel(samples, d, 1, sample);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples));
}

void zogd_replicas(benchmark::State& state, Execution exec) {
  constexpr std::size_t d = 50;
  const auto spec = make_diagonal_quadratic(log_spaced_spectrum(d, 1.0, 100.0), Vector(d, 0.0), 1.0, 0.0, 0);
  ZogdConfig cfg;
  cfg.steps = 2000;
  cfg.gamma = Schedule::constant(1.0 / (d * 100.0));
  cfg.tau = Schedule::constant(1.0);
  const auto repeats = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const auto ens = zogd_ensemble(spec, Vector(d, 1.0), cfg, Vector(d, 0.0), repeats, exec);
    benchmark::DoNotOptimize(ens);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * repeats * cfg.steps));
}

}  // namespace

BENCHMARK_CAPTURE(grid_argmin, serial, Execution::Serial)->Arg(36)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(grid_argmin, parallel, Execution::Parallel)->Arg(36)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sphere_moments, serial, Execution::Serial)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sphere_moments, parallel, Execution::Parallel)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(zogd_replicas, serial, Execution::Serial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(zogd_replicas, parallel, Execution::Parallel)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
