#include "zeroopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zeroopt/errors.hpp"

namespace zeroopt {

namespace {

// Guards the floor in build_grid so an axis whose exact ratio is integral
// keeps its endpoint.
constexpr double kFloorGuard = 1e-9;

}  // namespace

Box::Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty()) throw Error(ErrorKind::InvalidBox, "box must have dimension >= 1");
  if (lower_.size() != upper_.size()) {
    throw Error(ErrorKind::InvalidBox, "lower has " + std::to_string(lower_.size()) +
                                           " coordinates, upper has " +
                                           std::to_string(upper_.size()));
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
      throw Error(ErrorKind::InvalidBox, "non-finite bound on axis " + std::to_string(i));
    }
    if (lower_[i] > upper_[i]) {
      throw Error(ErrorKind::InvalidBox, "lower > upper on axis " + std::to_string(i));
    }
  }
}

Box Box::cube(std::size_t dim, double lo, double hi) {
  return Box(Vector(dim, lo), Vector(dim, hi));
}

bool Box::contains(std::span<const double> x, double tol) const {
  if (x.size() != dimension()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  }
  return true;
}

bool Box::contains(const Box& inner, double tol) const {
  if (inner.dimension() != dimension()) return false;
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (inner.lower_[i] < lower_[i] - tol || inner.upper_[i] > upper_[i] + tol) return false;
  }
  return true;
}

double max_edge(const Box& box) {
  double r = 0.0;
  for (std::size_t i = 0; i < box.dimension(); ++i) r = std::max(r, box.edge(i));
  return r;
}

Vector center(const Box& box) {
  Vector c(box.dimension());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (box.lower()[i] + box.upper()[i]);
  return c;
}

double diameter(const Box& box) {
  return distance(box.lower(), box.upper());
}

std::pair<double, double> shrink_edge(double lo, double hi, double c, double half_width) {
  double a = std::max(lo, c - half_width);
  double b = std::min(hi, c + half_width);
  // endpoints are rounded separately; trim ulps until the stored edge honours 2h
  const double cap = 2.0 * half_width;
  while (b - a > cap) {
    if (b - c >= c - a) {
      b = std::nextafter(b, a);
    } else {
      a = std::nextafter(a, b);
    }
  }
  return {a, b};
}

std::size_t GridSpec::total_points() const {
  std::size_t total = 1;
  for (std::size_t c : counts) {
    if (total > std::numeric_limits<std::size_t>::max() / (c + 1)) {
      throw Error(ErrorKind::BudgetExceeded, "grid point count overflows size_t");
    }
    total *= c + 1;
  }
  return total;
}

void GridSpec::unravel(std::size_t linear, std::span<std::size_t> index) const {
  for (std::size_t j = counts.size(); j-- > 0;) {
    const std::size_t extent = counts[j] + 1;
    index[j] = linear % extent;
    linear /= extent;
  }
}

void GridSpec::point(std::size_t linear, std::span<double> out) const {
  for (std::size_t j = counts.size(); j-- > 0;) {
    const std::size_t extent = counts[j] + 1;
    const auto i = static_cast<double>(linear % extent);
    linear /= extent;
    // The floor guard may admit an index whose point overshoots by rounding.
    out[j] = std::min(upper[j], base[j] + i * step);
  }
}

Vector GridSpec::point(std::size_t linear) const {
  Vector p(dimension());
  point(linear, p);
  return p;
}

GridSpec build_grid(const Box& box, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "grid resolution n must be >= 1");
  const double longest = max_edge(box);
  if (longest <= 0.0) throw Error(ErrorKind::DegenerateBox, "cannot grid a point box");

  GridSpec grid;
  grid.base = box.lower();
  grid.upper = box.upper();
  grid.step = longest / static_cast<double>(n);
  grid.counts.resize(box.dimension());
  for (std::size_t j = 0; j < box.dimension(); ++j) {
    const double ratio = box.edge(j) / grid.step + kFloorGuard;
    grid.counts[j] = std::min(n, static_cast<std::size_t>(std::floor(ratio)));
  }
  return grid;
}

double distance_sq(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "vectors of length " + std::to_string(a.size()) +
                                                  " and " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(distance_sq(a, b));
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace zeroopt
