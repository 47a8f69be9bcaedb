#include "zeroopt/zogd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "zeroopt/errors.hpp"

namespace zeroopt {

Schedule Schedule::constant(double value) {
  Schedule s;
  s.values_ = {value};
  s.constant_ = true;
  return s;
}

Schedule Schedule::per_step(std::vector<double> values) {
  Schedule s;
  s.values_ = std::move(values);
  s.constant_ = false;
  return s;
}

double Schedule::at(std::size_t k) const {
  if (constant_) return values_.at(0);
  if (k >= values_.size()) {
    throw Error(ErrorKind::InvalidArgument, "schedule has no value for step " + std::to_string(k));
  }
  return values_[k];
}

void Schedule::validate(std::size_t steps, const char* name) const {
  if (values_.empty()) throw Error(ErrorKind::InvalidArgument, std::string(name) + " schedule is empty");
  if (!constant_ && values_.size() < steps) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " schedule covers " +
                                                std::to_string(values_.size()) + " of " +
                                                std::to_string(steps) + " steps");
  }
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive and finite");
    }
  }
}

void TheoremThreeParams::validate() const {
  if (d < 1 || !(mu > 0.0) || !(big_l >= mu) || !(sigma >= 0.0) || !(delta_bound >= 0.0) ||
      !(gamma >= 0.0) || !(tau > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "invalid one-step bound parameters");
  }
}

Vector sample_sphere(std::size_t d, Rng& rng) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "sphere dimension must be >= 1");
  Vector e(d);
  double r = 0.0;
  do {
    rng.fill_normal(e);
    r = norm(e);
  } while (r == 0.0);
  for (double& x : e) x /= r;
  return e;
}

Vector grad_estimate(OracleHandle& handle, std::span<const double> x, double tau, Rng& rng,
                     std::optional<std::span<const double>> forced_direction) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  const std::size_t d = x.size();
  Vector e;
  if (forced_direction) {
    if (forced_direction->size() != d) {
      throw Error(ErrorKind::DimensionMismatch, "forced direction has the wrong dimension");
    }
    e.assign(forced_direction->begin(), forced_direction->end());
  } else {
    e = sample_sphere(d, rng);
  }
  Vector probe(d);
  for (std::size_t i = 0; i < d; ++i) probe[i] = x[i] + tau * e[i];
  const double f_plus = handle.eval(probe);
  for (std::size_t i = 0; i < d; ++i) probe[i] = x[i] - tau * e[i];
  const double f_minus = handle.eval(probe);
  if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
    throw Error(ErrorKind::NonFiniteValue, "oracle returned a non-finite value");
  }
  const double scale = static_cast<double>(d) / (2.0 * tau) * (f_plus - f_minus);
  for (double& v : e) v *= scale;
  return e;
}

namespace {

using StepObserver = std::function<void(std::size_t, const Vector&, double)>;

void check_config(const ZogdConfig& config) {
  config.gamma.validate(config.steps, "gamma");
  config.tau.validate(config.steps, "tau");
}

// Runs the K updates, reporting (k, x_{k}, |g_{k-1}|) after each one.
void iterate(OracleHandle& handle, Vector& x, const ZogdConfig& config,
             const StepObserver& observe) {
  Rng directions(derive_seed(config.seed, StreamRole::SphereDirection));
  for (std::size_t k = 0; k < config.steps; ++k) {
    const Vector g = grad_estimate(handle, x, config.tau.at(k), directions);
    const double gamma = config.gamma.at(k);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= gamma * g[i];
    const double r = norm(x);
    if (!std::isfinite(r) || r > config.divergence_limit) {
      throw Error(ErrorKind::NonFiniteValue,
                  "zoGD diverged at step " + std::to_string(k + 1) + " (|x| = " + std::to_string(r) + ")");
    }
    observe(k + 1, x, norm(g));
  }
}

}  // namespace

ZogdTrace zogd_run(OracleHandle& handle, Vector x0, const ZogdConfig& config,
                   std::optional<Vector> x_star) {
  check_config(config);
  if (handle.dimension() != 0 && handle.dimension() != x0.size()) {
    throw Error(ErrorKind::DimensionMismatch, "x0 does not match the objective dimension");
  }
  if (x_star && x_star->size() != x0.size()) {
    throw Error(ErrorKind::DimensionMismatch, "x_star does not match x0");
  }
  ZogdTrace trace;
  trace.points.reserve(config.steps + 1);
  trace.steps.reserve(config.steps);
  trace.points.push_back(x0);
  if (x_star) trace.distances_sq.push_back(distance_sq(x0, *x_star));

  Vector x = std::move(x0);
  std::uint64_t last = handle.call_count();
  iterate(handle, x, config, [&](std::size_t, const Vector& xk, double gnorm) {
    const std::uint64_t now = handle.call_count();
    trace.steps.push_back({gnorm, now - last});
    trace.total_calls += now - last;
    last = now;
    trace.points.push_back(xk);
    if (x_star) trace.distances_sq.push_back(distance_sq(xk, *x_star));
  });
  return trace;
}

ObjectiveSpec with_seed(const ObjectiveSpec& spec, std::uint64_t seed) {
  ObjectiveSpec out = spec;
  if (auto* q = std::get_if<NoisyQuadratic>(&out)) q->seed = seed;
  if (auto* s = std::get_if<SyntheticVeryGood>(&out)) s->seed = seed;
  return out;
}

namespace {

std::uint64_t spec_seed(const ObjectiveSpec& spec) {
  if (const auto* q = std::get_if<NoisyQuadratic>(&spec)) return q->seed;
  if (const auto* s = std::get_if<SyntheticVeryGood>(&spec)) return s->seed;
  return 0;
}

struct ReplicaCurves {
  std::vector<double> distance_sq;
  std::vector<double> grad_norm;
  std::uint64_t calls = 0;
};

}  // namespace

ZogdEnsemble zogd_ensemble(const ObjectiveSpec& spec, const Vector& x0, const ZogdConfig& config,
                           const Vector& x_star, std::size_t repeats, Execution exec) {
  check_config(config);
  if (repeats == 0) throw Error(ErrorKind::InvalidArgument, "repeats must be >= 1");
  if (x_star.size() != x0.size()) throw Error(ErrorKind::DimensionMismatch, "x_star does not match x0");
  const std::uint64_t base_seed = spec_seed(spec);

  const auto replicas = replicate<ReplicaCurves>(
      repeats,
      [&](std::size_t r) {
        OracleHandle handle(with_seed(spec, base_seed + r));
        ZogdConfig cfg = config;
        cfg.seed = config.seed + r;
        ReplicaCurves c;
        c.distance_sq.reserve(config.steps + 1);
        c.grad_norm.reserve(config.steps);
        c.distance_sq.push_back(distance_sq(x0, x_star));
        Vector x = x0;
        iterate(handle, x, cfg, [&](std::size_t, const Vector& xk, double gnorm) {
          c.distance_sq.push_back(distance_sq(xk, x_star));
          c.grad_norm.push_back(gnorm);
        });
        c.calls = handle.call_count();
        return c;
      },
      exec);

  ZogdEnsemble out;
  out.repeats = repeats;
  out.calls_per_replica = replicas.front().calls;
  out.mean_distance_sq.assign(config.steps + 1, 0.0);
  out.mean_grad_norm.assign(config.steps, 0.0);
  for (const auto& c : replicas) {
    for (std::size_t k = 0; k < c.distance_sq.size(); ++k) out.mean_distance_sq[k] += c.distance_sq[k];
    for (std::size_t k = 0; k < c.grad_norm.size(); ++k) out.mean_grad_norm[k] += c.grad_norm[k];
  }
  const auto n = static_cast<double>(repeats);
  for (double& v : out.mean_distance_sq) v /= n;
  for (double& v : out.mean_grad_norm) v /= n;
  return out;
}

StepSizes corollary3_schedule(std::size_t d, double big_l, double mu, double sigma,
                              std::size_t steps, double dist0_sq) {
  if (d < 1 || !(mu > 0.0) || !(big_l >= mu) || !(sigma >= 0.0) || steps < 1 || !(dist0_sq >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "invalid schedule inputs");
  }
  const double dd = static_cast<double>(d);
  const double cap = 1.0 / (5.0 * dd * big_l);
  StepSizes out;
  if (sigma == 0.0) {
    out.gamma = cap;
  } else {
    const double k = static_cast<double>(steps);
    const double arg = mu * mu * dist0_sq * k / (20.0 * dd * dd * sigma * sigma);
    out.gamma = std::min(cap, 2.0 * std::log(std::max(2.0, arg)) / (mu * k));
  }
  out.tau = std::max(std::sqrt(2.0 * dd * sigma * sigma / (mu * big_l)), kTauFloor);
  return out;
}

double theorem3_rhs(double dist_sq, double dist, const TheoremThreeParams& p) {
  p.validate();
  const double d = static_cast<double>(p.d);
  const double noise = p.delta_bound * p.delta_bound + p.sigma * p.sigma;
  const double second_order = 5.0 * d * d * p.gamma * p.gamma * noise;
  return (1.0 - p.gamma * p.mu + second_order / (p.tau * p.tau)) * dist_sq +
         (2.0 * d * p.gamma * p.delta_bound / p.tau) * dist + 2.0 * d * p.gamma * p.delta_bound +
         second_order;
}

double zogd_noise_floor(std::size_t d, double gamma, double sigma, double mu) {
  const double dd = static_cast<double>(d);
  return 10.0 * dd * dd * gamma * sigma * sigma / mu;
}

double zogd_mean_bound(std::size_t d, double gamma, double sigma, double mu, std::size_t steps,
                        double dist0_sq) {
  return std::pow(1.0 - 0.5 * gamma * mu, static_cast<double>(steps)) * dist0_sq +
         zogd_noise_floor(d, gamma, sigma, mu);
}

Plateau detect_plateau(const std::vector<double>& curve) {
  const std::size_t n = curve.size();
  if (n < 10) throw Error(ErrorKind::InvalidArgument, "curve too short for plateau detection");
  const auto mean = [&](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) s += curve[k];
    return s / static_cast<double>(end - begin);
  };
  Plateau p;
  p.level = mean(n - n / 5, n);
  const double last = mean(n - n / 10, n);
  const double previous = mean(n - n / 5, n - n / 10);
  p.drift = p.level > 0.0 ? std::abs(last - previous) / p.level : 0.0;
  p.reached = p.drift <= 0.1;
  return p;
}

}  // namespace zeroopt
