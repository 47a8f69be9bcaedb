#include "zeroopt/kernels.hpp"

#include <cmath>
#include <exception>

#include "zeroopt/errors.hpp"
#include "zeroopt/oracles.hpp"

namespace zeroopt {

namespace {

bool better(double v, std::size_t i, const ArgminResult& best) {
  return v < best.value || (v == best.value && i < best.index);
}

[[noreturn]] void throw_non_finite(std::size_t index) {
  throw Error(ErrorKind::NonFiniteValue,
              "objective returned a non-finite value at grid index " + std::to_string(index));
}

std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk) {
  return splitmix64(derive_seed(seed, StreamRole::MonteCarlo) + splitmix64(chunk));
}

void run_chunk(std::size_t chunk, std::size_t samples, std::uint64_t seed, const SampleFn& sample,
               std::vector<double>& sum, std::vector<double>& sum_sq) {
  const std::size_t begin = chunk * samples / kMonteCarloChunks;
  const std::size_t end = (chunk + 1) * samples / kMonteCarloChunks;
  Rng rng(chunk_seed(seed, chunk));
  std::vector<double> buf(sum.size());
  for (std::size_t s = begin; s < end; ++s) {
    sample(rng, buf);
    for (std::size_t i = 0; i < buf.size(); ++i) {
      sum[i] += buf[i];
      sum_sq[i] += buf[i] * buf[i];
    }
  }
}

MomentSums combine(std::vector<std::vector<double>>& sums, std::vector<std::vector<double>>& sqs,
                   std::size_t width, std::size_t samples) {
  MomentSums out{std::vector<double>(width, 0.0), std::vector<double>(width, 0.0), samples};
  for (std::size_t c = 0; c < kMonteCarloChunks; ++c) {
    for (std::size_t i = 0; i < width; ++i) {
      out.sum[i] += sums[c][i];
      out.sum_sq[i] += sqs[c][i];
    }
  }
  return out;
}

}  // namespace

ArgminResult argmin_serial(std::size_t count, std::size_t dim, const PointFn& point_at,
                           const ValueFn& value) {
  ArgminResult best;
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < count; ++i) {
    point_at(i, x);
    const double v = value(x);
    if (!std::isfinite(v)) throw_non_finite(i);
    if (better(v, i, best)) best = {i, v};
  }
  return best;
}

ArgminResult argmin_parallel(std::size_t count, std::size_t dim, const PointFn& point_at,
                             const ValueFn& value) {
  ArgminResult best;
  std::size_t bad_index = count;
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel
  {
    ArgminResult local;
    std::size_t local_bad = count;
    std::vector<double> x(dim);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      try {
        point_at(i, x);
        const double v = value(x);
        if (!std::isfinite(v)) {
          if (i < local_bad) local_bad = i;
        } else if (better(v, i, local)) {
          local = {i, v};
        }
      } catch (...) {
#pragma omp critical(zeroopt_argmin_failure)
        if (!failure) failure = std::current_exception();
      }
    }
#pragma omp critical(zeroopt_argmin_reduce)
    {
      if (better(local.value, local.index, best)) best = local;
      if (local_bad < bad_index) bad_index = local_bad;
    }
  }
  if (failure) std::rethrow_exception(failure);
  if (bad_index < count) throw_non_finite(bad_index);
  return best;
}

ArgminResult evaluate_argmin(OracleHandle& handle, std::size_t count, std::size_t dim,
                             const PointFn& point_at, Execution exec) {
  if (exec == Execution::Parallel && handle.parallel_safe()) {
    const ArgminResult r = argmin_parallel(count, dim, point_at, [&handle](std::span<const double> x) {
      return handle.value(x);
    });
    handle.add_calls(count);
    return r;
  }
  return argmin_serial(count, dim, point_at,
                       [&handle](std::span<const double> x) { return handle.eval(x); });
}

double MomentSums::std_error(std::size_t i) const {
  const auto n = static_cast<double>(samples);
  const double m = sum[i] / n;
  const double var = std::max(0.0, (sum_sq[i] / n - m * m) * n / (n - 1.0));
  return std::sqrt(var / n);
}

MomentSums mc_moments_serial(std::size_t samples, std::size_t width, std::uint64_t seed,
                             const SampleFn& sample) {
  std::vector<std::vector<double>> sums(kMonteCarloChunks, std::vector<double>(width, 0.0));
  auto sqs = sums;
  for (std::size_t c = 0; c < kMonteCarloChunks; ++c) run_chunk(c, samples, seed, sample, sums[c], sqs[c]);
  return combine(sums, sqs, width, samples);
}

MomentSums mc_moments_parallel(std::size_t samples, std::size_t width, std::uint64_t seed,
                               const SampleFn& sample) {
  std::vector<std::vector<double>> sums(kMonteCarloChunks, std::vector<double>(width, 0.0));
  auto sqs = sums;
  std::exception_ptr failure;
  const auto chunks = static_cast<std::ptrdiff_t>(kMonteCarloChunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    try {
      const auto k = static_cast<std::size_t>(c);
      run_chunk(k, samples, seed, sample, sums[k], sqs[k]);
    } catch (...) {
#pragma omp critical(zeroopt_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return combine(sums, sqs, width, samples);
}

}  // namespace zeroopt
