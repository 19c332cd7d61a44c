#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "sej/error.hpp"
#include "sej/imprecision.hpp"
#include "sej/special.hpp"

using namespace sej;

namespace {

template <class F>
double simpson(F f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// Beta density straight from the gamma function, independent of the library.
double density(double x, double a, double b) {
  return std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1) * std::log(x) +
                  (b - 1) * std::log1p(-x));
}

}  // namespace

TEST(FitBeta, QuarterIntervalMatchesPublishedParameters) {
  const auto m = fit_beta(interval_from_selection(30));
  EXPECT_NEAR(m.alpha(), 68.08, 0.5);
  EXPECT_NEAR(m.beta(), 158.56, 0.5);
  EXPECT_NEAR(m.cdf(0.35) - m.cdf(0.25), 0.9, 1e-6);
  EXPECT_NEAR(m.median(), 0.30, 1e-6);
}

TEST(FitBeta, SymmetricIntervalGivesEqualShapes) {
  const auto m = fit_beta(interval_from_selection(50));
  EXPECT_NEAR(m.alpha(), m.beta(), 1e-6 * m.alpha());
}

TEST(FitBeta, TenPercentIntervalVerifiedByQuadrature) {
  const auto m = fit_beta(interval_from_selection(10));
  const double mass = simpson([&](double x) { return density(x, m.alpha(), m.beta()); }, 0.05, 0.15, 4000);
  EXPECT_NEAR(mass, 0.9, 1e-6);
  const double below_mid = simpson([&](double x) { return density(x, m.alpha(), m.beta()); }, 1e-12, 0.10, 20000);
  EXPECT_NEAR(below_mid, 0.5, 1e-6);
}

TEST(FitBeta, EverySelectionFitsBothTargets) {
  for (int s = 0; s <= 100; s += 10) {
    const auto r = interval_from_selection(s);
    const auto m = fit_beta(r);
    EXPECT_NEAR(m.interval_mass(), 0.9, 1e-6) << s;
    EXPECT_NEAR(special::beta_quantile(0.5, m.alpha(), m.beta()), midpoint(r).value(), 1e-6) << s;
  }
}

TEST(FitBeta, MirrorSelectionsSwapShapes) {
  for (int s = 0; s <= 40; s += 10) {
    const auto a = fit_beta(interval_from_selection(s));
    const auto b = fit_beta(interval_from_selection(100 - s));
    EXPECT_NEAR(a.alpha(), b.beta(), 1e-4 * a.alpha()) << s;
    EXPECT_NEAR(a.beta(), b.alpha(), 1e-4 * a.beta()) << s;
  }
}

TEST(FitBeta, IsBitwiseDeterministic) {
  const auto a = fit_beta(interval_from_selection(70));
  const auto b = fit_beta(interval_from_selection(70));
  EXPECT_EQ(a.alpha(), b.alpha());
  EXPECT_EQ(a.beta(), b.beta());
}

TEST(FitBeta, OtherMassesAreHonoured) {
  FitOptions o;
  o.interval_mass = 0.5;
  const auto m = fit_beta(interval_from_selection(60), o);
  EXPECT_NEAR(m.interval_mass(), 0.5, 1e-6);
}

TEST(FitBeta, RejectsBadOptions) {
  FitOptions o;
  o.interval_mass = 1.0;
  EXPECT_THROW(fit_beta(interval_from_selection(30), o), ValidationError);
  o = {};
  o.tol = 0.0;
  EXPECT_THROW(fit_beta(interval_from_selection(30), o), ValidationError);
}

TEST(FitBeta, ExhaustedBudgetReportsResiduals) {
  FitOptions o;
  o.max_iterations = 1;
  o.tol = 1e-15;
  try {
    fit_beta(interval_from_selection(30), o);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("residual"), std::string::npos) << e.what();
  }
}

TEST(ImprecisionModel, RejectsNonPositiveShapes) {
  EXPECT_THROW(ImprecisionModel(0.0, 1.0, interval_from_selection(30)), ValidationError);
  EXPECT_THROW(ImprecisionModel(1.0, -2.0, interval_from_selection(30)), ValidationError);
}

TEST(Sample, MeanOfPublishedFit) {
  const ImprecisionModel m(68.08, 158.56, interval_from_selection(30));
  const auto xs = sample_values(m, 100000, 11);
  double sum = 0;
  for (double x : xs) sum += x;
  EXPECT_NEAR(sum / xs.size(), 68.08 / 226.64, 0.005);
}

TEST(Sample, SymmetricBetaMean) {
  const ImprecisionModel m(2.0, 2.0, interval_from_selection(50));
  const auto xs = sample(m, 100000, 5);
  double sum = 0;
  for (auto x : xs) sum += x.value();
  EXPECT_NEAR(sum / xs.size(), 0.5, 0.005);
}

TEST(Sample, SmallShapesStayInUnitInterval) {
  const ImprecisionModel m(0.3, 0.4, interval_from_selection(50));
  for (double x : sample_values(m, 20000, 3)) {
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
  }
}

TEST(Sample, SameSeedSameSequence) {
  const ImprecisionModel m(9.7, 84.7, interval_from_selection(10));
  EXPECT_EQ(sample_values(m, 1000, 42), sample_values(m, 1000, 42));
  EXPECT_NE(sample_values(m, 1000, 42), sample_values(m, 1000, 43));
}

TEST(Sample, FractionInsideIntervalTracksMass) {
  for (int s = 0; s <= 100; s += 10) {
    const auto r = interval_from_selection(s);
    const auto m = fit_beta(r);
    int inside = 0;
    const auto xs = sample_values(m, 100000, 1000 + s);
    for (double x : xs) inside += (x >= r.lo().value() && x <= r.hi().value());
    EXPECT_NEAR(inside / 1e5, 0.9, 0.01) << s;
  }
}

TEST(Sample, RejectsNonPositiveCount) {
  const ImprecisionModel m(2.0, 2.0, interval_from_selection(50));
  EXPECT_THROW(sample(m, 0, 1), ValidationError);
}

TEST(BetaFitCache, ReturnsStoredFitAndIsThreadSafe) {
  BetaFitCache cache;
  std::vector<std::jthread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&cache] {
      for (int s = 0; s <= 100; s += 10) cache.get(interval_from_selection(s));
    });
  }
  workers.clear();
  EXPECT_EQ(cache.size(), 11u);
  const auto direct = fit_beta(interval_from_selection(40));
  EXPECT_EQ(cache.get(interval_from_selection(40)).alpha(), direct.alpha());
}
