#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "zeroopt/random.hpp"

namespace zeroopt {

class OracleHandle;

enum class Execution { Serial, Parallel };

struct ArgminResult {
  std::size_t index = 0;
  double value = std::numeric_limits<double>::infinity();
};

using PointFn = std::function<void(std::size_t, std::span<double>)>;
using ValueFn = std::function<double(std::span<const double>)>;

// Argmin over indices 0..count-1, ties to the smallest index. Both variants
// return identical results; the serial one is the reference. A non-finite
// value raises NonFiniteValue.
ArgminResult argmin_serial(std::size_t count, std::size_t dim, const PointFn& point_at,
                           const ValueFn& value);
ArgminResult argmin_parallel(std::size_t count, std::size_t dim, const PointFn& point_at,
                             const ValueFn& value);

/// Evaluates `count` points through the oracle. Runs in parallel only when
/// asked to and the handle is parallel-safe; the call count matches the
/// serial path exactly.
ArgminResult evaluate_argmin(OracleHandle& handle, std::size_t count, std::size_t dim,
                             const PointFn& point_at, Execution exec);

/// Componentwise sums of a vector-valued sample and its square.
struct MomentSums {
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::size_t samples = 0;

  double mean(std::size_t i) const { return sum[i] / static_cast<double>(samples); }
  /// Standard error of the mean for component i.
  double std_error(std::size_t i) const;
};

using SampleFn = std::function<void(Rng&, std::span<double>)>;

/// Work is split into a fixed number of chunks, each with its own derived
/// stream, and partial sums are combined in chunk order. The result does not
/// depend on the thread count and the two variants agree bit for bit.
inline constexpr std::size_t kMonteCarloChunks = 64;

MomentSums mc_moments_serial(std::size_t samples, std::size_t width, std::uint64_t seed,
                             const SampleFn& sample);
MomentSums mc_moments_parallel(std::size_t samples, std::size_t width, std::uint64_t seed,
                               const SampleFn& sample);

/// Runs fn(r) for r in [0, count) and returns results in replica order.
template <class T>
std::vector<T> replicate(std::size_t count, const std::function<T(std::size_t)>& fn,
                         Execution exec) {
  std::vector<T> out(count);
  if (exec == Execution::Serial) {
    for (std::size_t r = 0; r < count; ++r) out[r] = fn(r);
    return out;
  }
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    try {
      out[static_cast<std::size_t>(r)] = fn(static_cast<std::size_t>(r));
    } catch (...) {
#pragma omp critical(zeroopt_replicate_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace zeroopt
