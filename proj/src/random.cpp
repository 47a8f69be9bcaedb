#include "zeroopt/random.hpp"

#include <bit>
#include <cmath>

namespace zeroopt {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

void Rng::fill_normal(std::span<double> out) {
  for (double& x : out) x = normal();
}

double hash_to_unit(std::uint64_t seed, std::span<const double> coords) noexcept {
  std::uint64_t h = splitmix64(seed ^ (0x632be59bd9b4e019ULL * (coords.size() + 1)));
  for (double c : coords) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(c));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace zeroopt
