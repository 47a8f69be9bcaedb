#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace zeroopt {

using Vector = std::vector<double>;

/// Axis-aligned box [lower, upper] in R^d. Zero-width edges are allowed.
class Box {
 public:
  Box() = default;
  /// Throws InvalidBox when the bounds disagree in size, are empty, are not
  /// finite, or lower_i > upper_i for some i.
  Box(Vector lower, Vector upper);

  static Box cube(std::size_t dim, double lo, double hi);

  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  std::size_t dimension() const noexcept { return lower_.size(); }
  double edge(std::size_t i) const { return upper_[i] - lower_[i]; }

  bool contains(std::span<const double> x, double tol = 0.0) const;
  bool contains(const Box& inner, double tol = 0.0) const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  Vector lower_;
  Vector upper_;
};

double max_edge(const Box& box);
Vector center(const Box& box);
double diameter(const Box& box);

/// Clipped interval update: (max(lo, c - h), min(hi, c + h)), trimmed by a few
/// ulps when rounding leaves the stored width above 2h.
std::pair<double, double> shrink_edge(double lo, double hi, double center, double half_width);

/// Uniform lattice base + i * step with 0 <= i_j <= counts_j. Points are
/// addressed lexicographically (axis 0 most significant) and generated on
/// demand; nothing is materialized.
struct GridSpec {
  Vector base;
  Vector upper;  // clamp bound, the originating box's upper corner
  double step = 0.0;
  std::vector<std::size_t> counts;

  std::size_t dimension() const noexcept { return base.size(); }
  std::size_t total_points() const;

  /// Decodes a linear index into its per-axis index vector.
  void unravel(std::size_t linear, std::span<std::size_t> index) const;
  void point(std::size_t linear, std::span<double> out) const;
  Vector point(std::size_t linear) const;
};

/// Grid with step max_edge(box)/n; the longest axis carries n + 1 points.
/// Throws DegenerateBox when max_edge(box) == 0 and InvalidArgument when n == 0.
GridSpec build_grid(const Box& box, std::size_t n);

double norm(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);
double distance_sq(std::span<const double> a, std::span<const double> b);

}  // namespace zeroopt
