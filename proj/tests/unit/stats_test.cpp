#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lightroute/stats.hpp"

using namespace lightroute;

namespace {

// Two-pass oracle.
std::pair<double, double> two_pass(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, xs.size() < 2 ? 0.0 : ss / static_cast<double>(xs.size() - 1)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(MeanVar, SingleSample) {
  auto e = update(MeanVarEstimator{}, 5.0);
  EXPECT_EQ(e.count(), 1u);
  EXPECT_DOUBLE_EQ(e.mean(), 5.0);
  EXPECT_DOUBLE_EQ(e.variance(), 0.0);
}

TEST(MeanVar, HandExample) {
  MeanVarEstimator e;
  for (double x : {2.0, 4.0, 6.0}) e = update(e, x);
  EXPECT_DOUBLE_EQ(e.mean(), 4.0);
  EXPECT_DOUBLE_EQ(e.variance(), 4.0);
}

TEST(MeanVar, ConstantStream) {
  MeanVarEstimator e;
  for (int i = 0; i < 1000; ++i) e.update(3.0);
  EXPECT_DOUBLE_EQ(e.mean(), 3.0);
  EXPECT_DOUBLE_EQ(e.variance(), 0.0);
}

TEST(MeanVar, MatchesTwoPassOracleOnRandomStreams) {
  std::mt19937_64 gen(2024);
  for (std::size_t n : {2u, 17u, 1000u, 100000u}) {
    std::lognormal_distribution<double> dist(1.0, 1.5);
    std::vector<double> xs(n);
    for (auto& x : xs) x = dist(gen) + 1e4;  // offset stresses cancellation
    MeanVarEstimator e;
    for (double x : xs) {
      e.update(x);
      ASSERT_GE(e.variance(), 0.0);
    }
    auto [m, v] = two_pass(xs);
    EXPECT_LE(rel(e.mean(), m), 1e-9) << n;
    EXPECT_LE(std::abs(e.variance() - v) / std::max(1.0, v), 1e-9) << n;
  }
}

TEST(MeanVar, RejectsNonFinite) {
  MeanVarEstimator e;
  EXPECT_THROW(e.update(std::nan("")), std::invalid_argument);
}

TEST(Kalman, PerfectMeasurementLimit) {
  auto kf = kalman_update(ScalarKalman(100.0, 1.0, 0.0, 1e-12), 7.0);
  EXPECT_NEAR(kf.estimate(), 7.0, 1e-9);
}

TEST(Kalman, FlatPriorGivesBatchMean) {
  ScalarKalman kf(0.0, 1e12, 0.0, 1.0);
  for (double m : {1.0, 2.0, 3.0}) kf = kalman_update(kf, m);
  EXPECT_NEAR(kf.estimate(), 2.0, 1e-9);
}

TEST(Kalman, ErrorCovarianceContracts) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (double q : {0.0, 0.3}) {
    ScalarKalman kf(0.0, 50.0, q, 2.0);
    for (int i = 0; i < 200; ++i) {
      const double before = kf.error_cov() + kf.process_noise();
      kf.update(u(gen));
      EXPECT_LE(kf.error_cov(), before);
    }
  }
}

TEST(Kalman, RunningMeanProperty) {
  std::mt19937_64 gen(99);
  std::exponential_distribution<double> dist(0.01);
  for (double r : {0.5, 1.0, 20.0}) {
    ScalarKalman kf(123.0, 1e6 * r * 1e6, 0.0, r);
    double sum = 0.0;
    for (int n = 1; n <= 500; ++n) {
      const double x = dist(gen);
      sum += x;
      kf.update(x);
      if (n >= 10) {
        ASSERT_LE(rel(kf.estimate(), sum / n), 1e-9) << "r=" << r << " n=" << n;
      }
    }
  }
}

TEST(DurationEstimator, ReportsPriorUntilTwoSamples) {
  DurationEstimator e(10.0, 100.0);
  EXPECT_DOUBLE_EQ(e.mean(), 10.0);
  EXPECT_DOUBLE_EQ(e.variance(), 100.0);
  e.add(4.0);
  EXPECT_DOUBLE_EQ(e.mean(), 10.0);
  e.add(6.0);
  EXPECT_DOUBLE_EQ(e.mean(), 5.0);
  EXPECT_DOUBLE_EQ(e.variance(), 2.0);
}

TEST(DurationEstimator, KalmanSuppliesMean) {
  DurationEstimator e(10.0, 100.0, EstimatorConfig{EstimatorKind::kalman, 0.0, 1.0});
  for (double x : {1.0, 2.0, 3.0, 4.0}) e.add(x);
  EXPECT_NEAR(e.mean(), 2.5, 1e-9);
  EXPECT_NEAR(e.variance(), 5.0 / 3.0, 1e-12);
}

TEST(ScanWindow, RetainsMostRecent) {
  OccupancyScanWindow w(3, 4);
  for (std::uint32_t s : {0u, 1u, 2u, 3u, 1u}) w.push(s);
  EXPECT_EQ(w.size(), 4u);
  EXPECT_EQ(w.samples(), (std::vector<std::uint32_t>{1, 2, 3, 1}));
  EXPECT_THROW(w.push(4), std::invalid_argument);
}

TEST(OfferedLoad, IdleWindow) {
  OccupancyScanWindow w(3, 10);
  for (int i = 0; i < 4; ++i) w.push(0);
  auto est = estimate_offered_load(w, 2.0);
  EXPECT_DOUBLE_EQ(est.mean_occupancy, 0.0);
  EXPECT_DOUBLE_EQ(est.blocking, 0.0);
  ASSERT_TRUE(est.arrival_rate);
  EXPECT_DOUBLE_EQ(*est.arrival_rate, 0.0);
}

TEST(OfferedLoad, HandExamples) {
  OccupancyScanWindow a(3, 10);
  for (std::uint32_t s : {1u, 1u, 2u, 2u}) a.push(s);
  auto ea = estimate_offered_load(a, 2.0);
  EXPECT_DOUBLE_EQ(ea.mean_occupancy, 1.5);
  EXPECT_DOUBLE_EQ(ea.blocking, 0.0);
  EXPECT_DOUBLE_EQ(*ea.arrival_rate, 0.75);

  OccupancyScanWindow b(3, 10);
  for (std::uint32_t s : {3u, 3u, 3u, 1u}) b.push(s);
  auto eb = estimate_offered_load(b, 1.0);
  EXPECT_DOUBLE_EQ(eb.mean_occupancy, 2.5);
  EXPECT_DOUBLE_EQ(eb.blocking, 0.75);
  EXPECT_DOUBLE_EQ(*eb.arrival_rate, 10.0);
}

TEST(OfferedLoad, SaturatedWindowHasNoRate) {
  OccupancyScanWindow w(2, 3);
  for (int i = 0; i < 3; ++i) w.push(2);
  EXPECT_TRUE(estimate_offered_load(w, 1.0).saturated());
}

TEST(ElementStats, HoldingMomentsFallBackToPrior) {
  ElementStats s;
  s.prior_holding_mean = 2.0;
  s.prior_holding_variance = 4.0;
  EXPECT_EQ(s.holding_moments({0, 1}), (std::pair<double, double>{2.0, 4.0}));
  s.holding({0, 1}).add(1.0);
  s.holding({0, 1}).add(3.0);
  EXPECT_EQ(s.holding_moments({0, 1}), (std::pair<double, double>{2.0, 2.0}));
  EXPECT_EQ(s.holding_moments({1, 0}), (std::pair<double, double>{2.0, 4.0}));
}
