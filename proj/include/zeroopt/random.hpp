#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace zeroopt {

/// Substream roles. A stream seed is the user seed XOR the role constant.
enum class StreamRole : std::uint64_t {
  OracleNoise = 0x9e3779b97f4a7c15ULL,
  PointDelta = 0xd1b54a32d192ed03ULL,
  SphereDirection = 0x8cb92ba72f3d8dd7ULL,
  MonteCarlo = 0xa0761d6478bd642fULL,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamRole role) noexcept {
  return seed ^ static_cast<std::uint64_t>(role);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// mt19937_64 with hand-written uniform and normal transforms. The standard
/// distributions are implementation-defined, so they would break
/// cross-platform reproducibility of traces.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  /// Standard normal (Marsaglia polar method).
  double normal();
  void fill_normal(std::span<double> out);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Counter-free uniform [0, 1) keyed by a seed and the exact bit patterns of
/// the coordinates. Same key, same value; distinct keys look independent.
double hash_to_unit(std::uint64_t seed, std::span<const double> coords) noexcept;

}  // namespace zeroopt
