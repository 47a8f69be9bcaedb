#include "zeroopt/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zeroopt/errors.hpp"

namespace zeroopt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t spec_seed(const ObjectiveSpec& spec) {
  if (const auto* s = std::get_if<SyntheticVeryGood>(&spec)) return s->seed;
  if (const auto* q = std::get_if<NoisyQuadratic>(&spec)) return q->seed;
  return 0;
}

bool is_diagonal(const Eigen::MatrixXd& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j && a(i, j) != 0.0) return false;
    }
  }
  return true;
}

double levy(double x, double y) {
  constexpr double pi = std::numbers::pi;
  const double s1 = std::sin(3.0 * pi * (x - 2.7));
  const double s2 = std::sin(3.0 * pi * (y - 0.3));
  const double s3 = std::sin(2.0 * pi * (y - 0.3));
  return s1 * s1 + (x - 3.7) * (x - 3.7) * (1.0 + s2 * s2) +
         (y - 1.3) * (y - 1.3) * (1.0 + s3 * s3);
}

}  // namespace

void GoodClassParams::validate() const {
  if (!(mu > 0.0) || !(big_l >= mu) || !std::isfinite(big_l)) {
    throw Error(ErrorKind::InvalidArgument, "good class requires 0 < mu <= L");
  }
}

VeryGoodClassParams VeryGoodClassParams::with_max_delta(double big_m, std::size_t d) {
  if (d < 2) {
    throw Error(ErrorKind::DimensionTooSmall, "very good class is defined for d >= 2 only");
  }
  return {big_m, d, big_m / (16.0 * static_cast<double>(d - 1))};
}

void VeryGoodClassParams::validate() const {
  if (d < 2) {
    throw Error(ErrorKind::DimensionTooSmall, "very good class is defined for d >= 2 only");
  }
  if (!(big_m > 0.0)) throw Error(ErrorKind::InvalidArgument, "M must be positive");
  if (!(delta_bound >= 0.0)) throw Error(ErrorKind::InvalidArgument, "delta bound must be >= 0");
}

std::string variant_name(const ObjectiveSpec& spec) {
  return std::visit(Overloaded{
                        [](const OscillatingParabola&) { return std::string("OscillatingParabola"); },
                        [](const Levy2D&) { return std::string("Levy2D"); },
                        [](const SyntheticVeryGood&) { return std::string("SyntheticVeryGood"); },
                        [](const NoisyQuadratic&) { return std::string("NoisyQuadratic"); },
                        [](const UserAnalytic&) { return std::string("UserAnalytic"); },
                    },
                    spec);
}

void validate(const ObjectiveSpec& spec) {
  std::visit(
      Overloaded{
          [](const OscillatingParabola&) {},
          [](const Levy2D&) {},
          [](const SyntheticVeryGood& s) {
            const std::size_t d = s.x_star.size();
            if (d < 2) {
              throw Error(ErrorKind::DimensionTooSmall,
                          "SyntheticVeryGood needs d >= 2; use BBS for d = 1");
            }
            if (!(s.big_m > 0.0)) throw Error(ErrorKind::InvalidArgument, "M must be positive");
            const double cap = s.big_m / (16.0 * static_cast<double>(d - 1));
            if (!(s.delta_bound >= 0.0) || s.delta_bound > cap * (1.0 + 1e-12)) {
              throw Error(ErrorKind::InvalidArgument,
                          "delta_bound must lie in [0, M/(16(d-1))] = [0, " +
                              std::to_string(cap) + "]");
            }
          },
          [](const NoisyQuadratic& q) {
            const auto d = static_cast<Eigen::Index>(q.x_star.size());
            if (d < 1) throw Error(ErrorKind::InvalidArgument, "x_star must be non-empty");
            if (q.matrix_a.rows() != d || q.matrix_a.cols() != d) {
              throw Error(ErrorKind::DimensionMismatch, "matrix_a must be d x d with d = " +
                                                            std::to_string(d));
            }
            if (!q.matrix_a.allFinite()) {
              throw Error(ErrorKind::InvalidArgument, "matrix_a has non-finite entries");
            }
            if ((q.matrix_a - q.matrix_a.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
              throw Error(ErrorKind::InvalidArgument, "matrix_a is not symmetric");
            }
            Eigen::LLT<Eigen::MatrixXd> llt(q.matrix_a);
            if (llt.info() != Eigen::Success) {
              throw Error(ErrorKind::InvalidArgument, "matrix_a is not positive definite");
            }
            if (!(q.sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma must be >= 0");
            if (!(q.delta_bound >= 0.0)) {
              throw Error(ErrorKind::InvalidArgument, "delta_bound must be >= 0");
            }
          },
          [](const UserAnalytic& u) {
            if (!u.fn) throw Error(ErrorKind::InvalidArgument, "UserAnalytic without a callable");
            if (u.known_x_star && u.dim != 0 && u.known_x_star->size() != u.dim) {
              throw Error(ErrorKind::DimensionMismatch, "known_x_star has the wrong dimension");
            }
          },
      },
      spec);
}

SyntheticVeryGood make_synthetic_very_good(double big_m, Vector x_star, std::uint64_t seed) {
  const std::size_t d = x_star.size();
  if (d < 2) throw Error(ErrorKind::DimensionTooSmall, "SyntheticVeryGood needs d >= 2");
  const double delta = big_m / (16.0 * static_cast<double>(d - 1));
  return SyntheticVeryGood{big_m, std::move(x_star), delta, seed};
}

NoisyQuadratic make_diagonal_quadratic(const Vector& spectrum, Vector x_star, double sigma,
                                       double delta_bound, std::uint64_t seed) {
  if (spectrum.size() != x_star.size()) {
    throw Error(ErrorKind::DimensionMismatch, "spectrum and x_star differ in length");
  }
  NoisyQuadratic q;
  q.matrix_a = Eigen::VectorXd::Map(spectrum.data(), static_cast<Eigen::Index>(spectrum.size()))
                   .asDiagonal();
  q.x_star = std::move(x_star);
  q.sigma = sigma;
  q.delta_bound = delta_bound;
  q.seed = seed;
  return q;
}

UserAnalytic rippled_quadratic(Vector x_star, double c, double rho, double omega) {
  if (!(c > 0.0) || !(rho >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "rippled quadratic needs c > 0 and rho >= 0");
  }
  UserAnalytic u;
  u.dim = x_star.size();
  u.known_x_star = x_star;
  u.thread_safe = true;
  u.name = "rippled_quadratic";
  u.fn = [x_star = std::move(x_star), c, rho, omega](std::span<const double> x) {
    double q = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = x[i] - x_star[i];
      q += t * t;
      s += t;
    }
    return q * (0.5 * c + 0.5 * rho * (1.0 - std::cos(omega * s)));
  };
  return u;
}

Vector log_spaced_spectrum(std::size_t d, double mu, double big_l) {
  Vector s(d, mu);
  if (d == 1) return s;
  const double lo = std::log(mu);
  const double hi = std::log(big_l);
  for (std::size_t i = 0; i < d; ++i) {
    s[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(d - 1));
  }
  s.front() = mu;
  s.back() = big_l;
  return s;
}

OracleHandle::OracleHandle(ObjectiveSpec spec)
    : spec_(std::move(spec)),
      noise_rng_(derive_seed(spec_seed(spec_), StreamRole::OracleNoise)),
      delta_seed_(derive_seed(spec_seed(spec_), StreamRole::PointDelta)) {
  zeroopt::validate(spec_);
  if (const auto* q = std::get_if<NoisyQuadratic>(&spec_)) diagonal_a_ = is_diagonal(q->matrix_a);
}

bool OracleHandle::deterministic() const noexcept {
  if (const auto* q = std::get_if<NoisyQuadratic>(&spec_)) return q->sigma == 0.0;
  return true;
}

bool OracleHandle::parallel_safe() const noexcept {
  if (const auto* u = std::get_if<UserAnalytic>(&spec_)) return u->thread_safe;
  return deterministic();
}

std::size_t OracleHandle::dimension() const noexcept {
  return std::visit(Overloaded{
                        [](const OscillatingParabola&) -> std::size_t { return 1; },
                        [](const Levy2D&) -> std::size_t { return 2; },
                        [](const SyntheticVeryGood& s) { return s.x_star.size(); },
                        [](const NoisyQuadratic& q) { return q.x_star.size(); },
                        [](const UserAnalytic& u) { return u.dim; },
                    },
                    spec_);
}

std::optional<Vector> OracleHandle::known_minimizer() const {
  return std::visit(Overloaded{
                        [](const OscillatingParabola&) -> std::optional<Vector> { return Vector{2.0}; },
                        [](const Levy2D&) -> std::optional<Vector> { return Vector{3.7, 1.3}; },
                        [](const SyntheticVeryGood& s) -> std::optional<Vector> { return s.x_star; },
                        [](const NoisyQuadratic& q) -> std::optional<Vector> { return q.x_star; },
                        [](const UserAnalytic& u) { return u.known_x_star; },
                    },
                    spec_);
}

void OracleHandle::check_dimension(std::span<const double> x) const {
  const std::size_t d = dimension();
  if (d != 0 && x.size() != d) {
    throw Error(ErrorKind::DimensionMismatch, variant_name(spec_) + " expects dimension " +
                                                  std::to_string(d) + ", got " +
                                                  std::to_string(x.size()));
  }
}

double OracleHandle::realized_delta(std::span<const double> x) const {
  double bound = 0.0;
  if (const auto* s = std::get_if<SyntheticVeryGood>(&spec_)) bound = s->delta_bound;
  if (const auto* q = std::get_if<NoisyQuadratic>(&spec_)) bound = q->delta_bound;
  if (bound == 0.0) return 0.0;
  return bound * (2.0 * hash_to_unit(delta_seed_, x) - 1.0);
}

double OracleHandle::draw_xi() {
  const auto* q = std::get_if<NoisyQuadratic>(&spec_);
  if (q == nullptr || q->sigma == 0.0) return 0.0;
  if (q->noise == NoiseKind::Uniform) {
    const double half = q->sigma * std::sqrt(3.0);
    return noise_rng_.uniform(-half, half);
  }
  return q->sigma * noise_rng_.normal();
}

double OracleHandle::evaluate(std::span<const double> x, double xi) const {
  return std::visit(
      Overloaded{
          [&](const OscillatingParabola&) {
            const double t = x[0] - 2.0;
            return 10.0 * t * t - 4.0 * std::cos(17.0 * t) + 4.0;
          },
          [&](const Levy2D&) { return levy(x[0], x[1]); },
          [&](const SyntheticVeryGood& s) {
            return (0.5 * s.big_m + realized_delta(x)) * distance_sq(x, s.x_star);
          },
          [&](const NoisyQuadratic& q) {
            const auto d = static_cast<Eigen::Index>(x.size());
            Eigen::VectorXd diff(d);
            for (Eigen::Index i = 0; i < d; ++i) diff[i] = x[i] - q.x_star[i];
            const double quad = diagonal_a_ ? 0.5 * diff.cwiseProduct(q.matrix_a.diagonal()).dot(diff)
                                            : 0.5 * diff.dot(q.matrix_a * diff);
            return quad + (xi + realized_delta(x)) * diff.norm();
          },
          [&](const UserAnalytic& u) { return u.fn(x); },
      },
      spec_);
}

double OracleHandle::eval(std::span<const double> x) {
  check_dimension(x);
  const double xi = draw_xi();
  ++calls_;
  return evaluate(x, xi);
}

double OracleHandle::value(std::span<const double> x) const {
  if (!deterministic()) {
    throw Error(ErrorKind::InvalidArgument, "value() is only defined for noise-free objectives");
  }
  check_dimension(x);
  return evaluate(x, 0.0);
}

namespace {

struct Margins {
  double lower;
  double upper;
  double tol = 0.0;
  bool skip = false;
};

template <class MarginFn>
ClassReport scan_grid(OracleHandle& handle, const Box& box, std::span<const double> x_star,
                      std::size_t grid_n, MarginFn&& margins) {
  if (!handle.deterministic()) {
    throw Error(ErrorKind::InvalidArgument, "class verification needs a noise-free objective");
  }
  if (x_star.size() != box.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "x_star and box differ in dimension");
  }
  const double f_star = handle.eval(x_star);
  const GridSpec grid = build_grid(box, grid_n);
  const std::size_t total = grid.total_points();

  ClassReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  Vector x(box.dimension());
  for (std::size_t k = 0; k < total; ++k) {
    grid.point(k, x);
    const double gap = handle.eval(x) - f_star;
    if (!std::isfinite(gap)) throw Error(ErrorKind::NonFiniteValue, "objective returned non-finite");
    const double q = distance_sq(x, x_star);
    const Margins m = margins(gap, q);
    if (m.skip) continue;
    ++report.points_checked;
    report.worst_margin = std::min({report.worst_margin, m.lower, m.upper});
    if (m.lower < -m.tol || m.upper < -m.tol) report.violations.push_back({x, m.lower, m.upper});
  }
  report.holds = report.violations.empty();
  if (report.points_checked == 0) report.worst_margin = 0.0;
  return report;
}

}  // namespace

ClassReport verify_good_class(OracleHandle& handle, const Box& box, const GoodClassParams& params,
                              std::span<const double> x_star, std::size_t grid_n) {
  params.validate();
  return scan_grid(handle, box, x_star, grid_n, [&](double gap, double q) {
    return Margins{gap - 0.5 * params.mu * q, 0.5 * params.big_l * q - gap,
                   1e-10 * (1.0 + std::abs(gap))};
  });
}

ClassReport verify_very_good_class(OracleHandle& handle, const Box& box,
                                   const VeryGoodClassParams& params,
                                   std::span<const double> x_star, std::size_t grid_n) {
  params.validate();
  if (params.d != box.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "class params and box differ in dimension");
  }
  return scan_grid(handle, box, x_star, grid_n, [&](double gap, double q) {
    if (q <= 1e-18) return Margins{0.0, 0.0, 0.0, true};
    const double ratio = gap / q;
    const double half_m = 0.5 * params.big_m;
    return Margins{ratio - (half_m - params.delta_bound), (half_m + params.delta_bound) - ratio,
                   1e-10 * (1.0 + std::abs(ratio))};
  });
}

}  // namespace zeroopt
