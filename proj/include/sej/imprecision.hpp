#pragma once

// Beta distributions standing for 10%-step interval responses: the interval
// carries `interval_mass` of probability and its midpoint is the median.

#include <cstdint>
#include <map>
#include <shared_mutex>
#include <tuple>
#include <vector>

#include "sej/judgment.hpp"

namespace sej {

struct FitOptions {
  double interval_mass = 0.9;
  double tol = 1e-6;
  int max_iterations = 500;
};

class ImprecisionModel {
 public:
  // Throws ValidationError unless alpha > 0 and beta > 0.
  ImprecisionModel(double alpha, double beta, IntervalResponse source);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const IntervalResponse& source() const { return source_; }

  double mean() const { return alpha_ / (alpha_ + beta_); }
  double cdf(double x) const;
  double median() const;
  // Probability carried by the source interval.
  double interval_mass() const;

 private:
  double alpha_;
  double beta_;
  IntervalResponse source_;
};

// Solves CDF(hi) - CDF(lo) = mass and median = midpoint for (alpha, beta).
// Throws ValidationError for bad inputs, ConvergenceError (with the last
// residuals in the message) when the iteration budget runs out.
ImprecisionModel fit_beta(const IntervalResponse& interval, const FitOptions& options = {});

// n independent Beta(alpha, beta) draws; identical for identical seeds.
std::vector<Probability> sample(const ImprecisionModel& model, int n, std::uint64_t seed);

// Same draws as `sample` without the Probability wrapper, for hot loops.
std::vector<double> sample_values(const ImprecisionModel& model, int n, std::uint64_t seed);

// Fits are memoised per (selection, mass, tol). Safe for concurrent use.
class BetaFitCache {
 public:
  ImprecisionModel get(const IntervalResponse& interval, const FitOptions& options = {});
  std::size_t size() const;

 private:
  using Key = std::tuple<int, double, double, int>;
  mutable std::shared_mutex mutex_;
  std::map<Key, ImprecisionModel> fits_;
};

}  // namespace sej
