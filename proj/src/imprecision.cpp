#include "sej/imprecision.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <sstream>

#include "sej/error.hpp"
#include "sej/rng.hpp"
#include "sej/special.hpp"

namespace sej {

ImprecisionModel::ImprecisionModel(double alpha, double beta, IntervalResponse source)
    : alpha_(alpha), beta_(beta), source_(source) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ValidationError("beta shape parameters must be positive and finite");
  }
}

double ImprecisionModel::cdf(double x) const { return special::beta_cdf(x, alpha_, beta_); }

double ImprecisionModel::median() const { return special::beta_quantile(0.5, alpha_, beta_); }

double ImprecisionModel::interval_mass() const {
  return cdf(source_.hi().value()) - cdf(source_.lo().value());
}

namespace {

using Vec2 = std::array<double, 2>;

struct Residual {
  double lo, hi, mid, mass;

  // Parameters are log-shapes so every iterate keeps alpha, beta > 0.
  Vec2 operator()(const Vec2& log_shape) const {
    const double a = std::exp(log_shape[0]);
    const double b = std::exp(log_shape[1]);
    return {special::beta_cdf(hi, a, b) - special::beta_cdf(lo, a, b) - mass,
            special::beta_quantile(0.5, a, b) - mid};
  }
};

double norm_inf(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

// Normal with mean `mid` whose central `mass` range is the interval, then
// converted to the beta with the same mean and variance.
Vec2 moment_matched_start(double mid, double half_width, double mass) {
  const double z = special::normal_quantile(0.5 * (1.0 + mass));
  const double sd = half_width / z;
  const double var = std::min(sd * sd, 0.5 * mid * (1.0 - mid));
  const double concentration = mid * (1.0 - mid) / var - 1.0;
  return {std::log(mid * concentration), std::log((1.0 - mid) * concentration)};
}

std::string describe_failure(const IntervalResponse& interval, const Vec2& x, const Vec2& r,
                             int iterations) {
  std::ostringstream os;
  os.precision(10);
  os << "beta fit for interval [" << interval.lo().value() << ", " << interval.hi().value()
     << "] did not converge after " << iterations << " iterations: alpha=" << std::exp(x[0])
     << " beta=" << std::exp(x[1]) << " mass residual=" << r[0] << " median residual=" << r[1];
  return os.str();
}

}  // namespace

ImprecisionModel fit_beta(const IntervalResponse& interval, const FitOptions& options) {
  const double lo = interval.lo().value();
  const double hi = interval.hi().value();
  const double mid = midpoint(interval).value();
  if (!(lo < hi)) throw ValidationError("degenerate interval");
  if (!(mid > 0.0 && mid < 1.0)) throw ValidationError("interval midpoint must lie in (0,1)");
  if (!(options.interval_mass > 0.0 && options.interval_mass < 1.0)) {
    throw ValidationError("interval_mass must lie in (0,1)");
  }
  if (!(options.tol > 0.0)) throw ValidationError("fit tolerance must be positive");

  const Residual residual{lo, hi, mid, options.interval_mass};
  Vec2 x = moment_matched_start(mid, 0.5 * (hi - lo), options.interval_mass);
  Vec2 r = residual(x);
  constexpr double kStep = 1e-6;

  for (int it = 0; it < options.max_iterations; ++it) {
    if (norm_inf(r) <= options.tol) {
      return ImprecisionModel(std::exp(x[0]), std::exp(x[1]), interval);
    }
    // Central-difference Jacobian in log-shape coordinates.
    std::array<Vec2, 2> jac{};
    for (int k = 0; k < 2; ++k) {
      Vec2 up = x, down = x;
      up[k] += kStep;
      down[k] -= kStep;
      const Vec2 ru = residual(up), rd = residual(down);
      jac[0][k] = (ru[0] - rd[0]) / (2.0 * kStep);
      jac[1][k] = (ru[1] - rd[1]) / (2.0 * kStep);
    }
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if (det == 0.0 || !std::isfinite(det)) break;
    const Vec2 step{(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
                    (-jac[1][0] * r[0] + jac[0][0] * r[1]) / det};

    // Backtrack until the residual norm decreases.
    double damping = 1.0;
    const double current = norm_inf(r);
    Vec2 next = x, rn = r;
    for (int half = 0; half < 40; ++half) {
      next = {x[0] - damping * step[0], x[1] - damping * step[1]};
      rn = residual(next);
      if (std::isfinite(rn[0]) && std::isfinite(rn[1]) && norm_inf(rn) < current) break;
      damping *= 0.5;
    }
    if (!(norm_inf(rn) < current)) {
      throw ConvergenceError(describe_failure(interval, x, r, it + 1));
    }
    x = next;
    r = rn;
  }
  if (norm_inf(r) <= options.tol) return ImprecisionModel(std::exp(x[0]), std::exp(x[1]), interval);
  throw ConvergenceError(describe_failure(interval, x, r, options.max_iterations));
}

std::vector<double> sample_values(const ImprecisionModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample size must be positive");
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(rng.beta(model.alpha(), model.beta()));
  return out;
}

std::vector<Probability> sample(const ImprecisionModel& model, int n, std::uint64_t seed) {
  std::vector<Probability> out;
  out.reserve(static_cast<std::size_t>(n));
  for (double v : sample_values(model, n, seed)) out.emplace_back(v);
  return out;
}

ImprecisionModel BetaFitCache::get(const IntervalResponse& interval, const FitOptions& options) {
  const Key key{interval.selection(), options.interval_mass, options.tol, options.max_iterations};
  {
    std::shared_lock lock(mutex_);
    if (auto it = fits_.find(key); it != fits_.end()) return it->second;
  }
  ImprecisionModel fitted = fit_beta(interval, options);
  std::unique_lock lock(mutex_);
  return fits_.try_emplace(key, fitted).first->second;
}

std::size_t BetaFitCache::size() const {
  std::shared_lock lock(mutex_);
  return fits_.size();
}

}  // namespace sej
