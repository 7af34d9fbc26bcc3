#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dataval/errors.hpp"
#include "dataval/forecast.hpp"
#include "oracles.hpp"

namespace dataval {
namespace {

using testing::brute_force_dtw;

// Daily bins: one week is seven bins.
TimeGrid daily_grid(std::size_t obs_weeks, std::size_t ctrl_weeks) {
  TimeGrid g;
  g.bin_width = std::chrono::hours(24);
  g.n_bins = 7 * (obs_weeks + ctrl_weeks);
  g.observation = {0, 7 * obs_weeks};
  g.control = {7 * obs_weeks, g.n_bins};
  return g;
}

const std::vector<double> kProfile{3, 1, 4, 1, 5, 9, 2};

std::vector<double> repeat(const std::vector<double>& week, std::size_t times, double scale = 1.0) {
  std::vector<double> out;
  for (std::size_t w = 0; w < times; ++w) {
    for (double x : week) out.push_back(x * scale);
  }
  return out;
}

TEST(SeasonalProfile, PeriodicSeriesIsFixedPoint) {
  const auto grid = daily_grid(4, 2);
  const auto observed = repeat(kProfile, 4);
  const auto pred = SeasonalProfileForecaster().fit_predict(observed, grid);
  EXPECT_EQ(pred.values, repeat(kProfile, 2));
  EXPECT_NEAR(cosine_similarity(repeat(kProfile, 2), pred.values), 1.0, 1e-12);
}

TEST(SeasonalProfile, ConstantSeries) {
  const auto grid = daily_grid(3, 1);
  const std::vector<double> observed(21, 4.5);
  const auto pred = SeasonalProfileForecaster().fit_predict(observed, grid);
  ASSERT_EQ(pred.values.size(), 7u);
  for (double x : pred.values) EXPECT_DOUBLE_EQ(x, 4.5);
}

TEST(SeasonalProfile, TrendRatioScalesLastWeek) {
  const auto grid = daily_grid(2, 1);
  auto observed = kProfile;
  for (double x : kProfile) observed.push_back(3 * x);
  const auto pred = SeasonalProfileForecaster().fit_predict(observed, grid);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(pred.values[i], 3 * kProfile[i], 1e-12);
}

TEST(SeasonalProfile, PhaseFollowsObservationBoundary) {
  // Observation window that is not a whole number of weeks: the profile uses
  // the trailing complete weeks, so control bin 0 continues the last bin.
  TimeGrid grid;
  grid.bin_width = std::chrono::hours(24);
  grid.n_bins = 17 + 7;
  grid.observation = {0, 17};
  grid.control = {17, 24};
  std::vector<double> observed;
  for (std::size_t t = 0; t < 17; ++t) observed.push_back(kProfile[(t + 4) % 7]);
  const auto pred = SeasonalProfileForecaster().fit_predict(observed, grid);
  for (std::size_t k = 0; k < 7; ++k) EXPECT_DOUBLE_EQ(pred.values[k], kProfile[(17 + k + 4) % 7]);
}

TEST(SeasonalProfile, Errors) {
  const auto grid = daily_grid(2, 1);
  EXPECT_THROW(SeasonalProfileForecaster().fit_predict(std::vector<double>(14, 0.0), grid),
               UntrainableCoalition);
  EXPECT_THROW(SeasonalProfileForecaster().fit_predict(std::vector<double>(13, 1.0), grid), ContractError);
  const auto short_grid = daily_grid(1, 1);
  EXPECT_THROW(SeasonalProfileForecaster().fit_predict(std::vector<double>(7, 1.0), short_grid), ConfigError);
  EXPECT_THROW(make_forecaster("sarima"), ConfigError);
  EXPECT_EQ(make_forecaster("seasonal_profile")->name(), "seasonal_profile");
}

TEST(SeasonalProfile, Homogeneity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const auto grid = daily_grid(4, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> observed(28);
    for (double& x : observed) x = u(rng);
    const double c = 0.1 + u(rng);
    std::vector<double> scaled = observed;
    for (double& x : scaled) x *= c;
    const auto a = SeasonalProfileForecaster().fit_predict(observed, grid).values;
    const auto b = SeasonalProfileForecaster().fit_predict(scaled, grid).values;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], c * a[i], 1e-9 * (1 + c * a[i]));
  }
}

TEST(CosSim, Examples) {
  EXPECT_NEAR(cosine_similarity(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), 1.0, 1e-15);
  EXPECT_EQ(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_NEAR(cosine_similarity(std::vector<double>{1, 1}, std::vector<double>{1, 0}), 1.0 / std::sqrt(2.0),
              1e-15);
  EXPECT_EQ(cosine_similarity(std::vector<double>{1, 1}, std::vector<double>{0, 0}), 0.0);
  EXPECT_THROW(cosine_similarity(std::vector<double>{1}, std::vector<double>{1, 2}), ContractError);
}

TEST(NumSim, Examples) {
  EXPECT_EQ(numerical_similarity(std::vector<double>{4, 1, 7}, std::vector<double>{4, 1, 7}), 1.0);
  EXPECT_EQ(numerical_similarity(std::vector<double>{1, 1}, std::vector<double>{0, 0}), 0.0);
  EXPECT_EQ(numerical_similarity(std::vector<double>{2, 0}, std::vector<double>{0, 2}), 0.0);
  // Zero-denominator terms contribute nothing but still count toward n.
  EXPECT_DOUBLE_EQ(numerical_similarity(std::vector<double>{0, 0}, std::vector<double>{0, 0}), 1.0);
}

TEST(Dtw, Examples) {
  EXPECT_EQ(dtw_distance(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), 0.0);
  EXPECT_EQ(dtw_distance(std::vector<double>{0, 0}, std::vector<double>{1, 1}), 2.0);
  EXPECT_EQ(dtw_distance(std::vector<double>{1, 2}, std::vector<double>{1, 1, 2}), 0.0);
}

TEST(Dtw, MatchesBruteForceOnShortSeries) {
  std::mt19937_64 rng(17);
  std::vector<std::vector<double>> pool;
  for (int s = 0; s < 100; ++s) {
    std::vector<double> v(1 + rng() % 6);
    for (double& x : v) x = static_cast<double>(static_cast<int>(rng() % 11) - 3);
    pool.push_back(v);
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i; j < pool.size(); j += 7) {
      EXPECT_EQ(dtw_distance(pool[i], pool[j]), brute_force_dtw(pool[i], pool[j]));
      if (pool[i].size() == pool[j].size()) {
        double diagonal = 0.0;
        for (std::size_t t = 0; t < pool[i].size(); ++t) diagonal += std::abs(pool[i][t] - pool[j][t]);
        EXPECT_LE(dtw_distance(pool[i], pool[j]), diagonal);
      }
    }
  }
}

TEST(Rdtw, Examples) {
  EXPECT_EQ(relative_dtw(std::vector<double>{1, 5, 2}, std::vector<double>{1, 5, 2}), 1.0);
  EXPECT_EQ(relative_dtw(std::vector<double>{1, 5, 2}, std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_THROW(relative_dtw(std::vector<double>{0, 0}, std::vector<double>{1, 1}), ContractError);
}

TEST(Rdtw, OppositeTwoBinSeries) {
  // Every boundary-anchored path between [0,2] and [2,0] costs 4, so the
  // relative score is 1 - 4/2.
  const std::vector<double> truth{0, 2}, pred{2, 0};
  EXPECT_EQ(brute_force_dtw(truth, pred), 4.0);
  EXPECT_EQ(brute_force_dtw(truth, {0, 0}), 2.0);
  EXPECT_EQ(relative_dtw(truth, pred), -1.0);
}

TEST(Metrics, ScaleInvariance) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    std::vector<double> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = u(rng);
      pred[i] = u(rng);
    }
    const double c = 0.01 + u(rng), d = 0.01 + u(rng);
    auto cp = pred, dt = truth;
    for (double& x : cp) x *= c;
    for (double& x : dt) x *= d;
    EXPECT_NEAR(cosine_similarity(truth, cp), cosine_similarity(truth, pred), 1e-12);
    EXPECT_NEAR(numerical_similarity(dt, cp), numerical_similarity(truth, pred), 1e-12);
    EXPECT_NEAR(relative_dtw(dt, cp), relative_dtw(truth, pred), 1e-9);
    for (Metric m : {Metric::cossim, Metric::numsim, Metric::rdtw}) {
      EXPECT_NEAR(similarity(m, truth, truth), 1.0, 1e-12) << metric_name(m);
    }
  }
}

TEST(Metrics, NamesRoundTrip) {
  for (Metric m : {Metric::cossim, Metric::numsim, Metric::rdtw}) EXPECT_EQ(parse_metric(metric_name(m)), m);
  EXPECT_THROW(parse_metric("mape"), ConfigError);
}

}  // namespace
}  // namespace dataval
