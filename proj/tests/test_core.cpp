#include <algorithm>
#include <atomic>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "dataval/core.hpp"
#include "dataval/errors.hpp"

namespace dataval {
namespace {

TEST(Coalition, DeduplicatesAndCanonicalizes) {
  const auto c = Coalition::of({2, 0, 2}, 3);
  EXPECT_EQ(c.members(), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(c.bits(), 0b101u);
  EXPECT_EQ(c.key(), Coalition::of({0, 2}, 3).key());
}

TEST(Coalition, EmptyHasZeroKey) {
  const auto c = Coalition::of({}, 5);
  EXPECT_TRUE(c.empty());
  EXPECT_EQ(c.bits(), 0u);
}

TEST(Coalition, SixteenPlayersFillLowWord) {
  std::vector<std::size_t> all(16);
  std::iota(all.begin(), all.end(), std::size_t{0});
  EXPECT_EQ(Coalition::of(all, 16).bits(), 0xFFFFu);
  std::uint64_t expected = 0;
  for (std::size_t i : all) expected |= std::uint64_t{1} << i;
  EXPECT_EQ(Coalition::full(16).bits(), expected);
}

TEST(Coalition, RejectsOutOfRange) {
  EXPECT_THROW(Coalition::of({3}, 3), OutOfRangeError);
  EXPECT_THROW(Coalition::from_bits(0b1000, 3), OutOfRangeError);
  EXPECT_THROW(Coalition(100).bits(), ContractError);
}

TEST(Coalition, KeyRoundTripsForLargePlayerCounts) {
  std::mt19937_64 rng(7);
  for (std::size_t trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 400;
    std::set<std::size_t> members;
    const std::size_t k = rng() % (n + 1);
    for (std::size_t i = 0; i < k; ++i) members.insert(rng() % n);
    std::vector<std::size_t> shuffled(members.begin(), members.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto c = Coalition::of(shuffled, n);
    EXPECT_EQ(c.members(), std::vector<std::size_t>(members.begin(), members.end()));
    EXPECT_EQ(c.size(), members.size());
    // A different member set must give a different key.
    if (!members.empty()) {
      EXPECT_NE(c.without(*members.begin()).key(), c.key());
    }
  }
}

DemandPanel two_source_panel() {
  TimeGrid grid;
  grid.n_bins = 3;
  return DemandPanel::from_series(grid, "z", {{"a", "z", {1, 2, 3}}, {"b", "z", {0, 1, 0}}});
}

TEST(AggregateSeries, ElementWiseSum) {
  const auto panel = two_source_panel();
  EXPECT_EQ(aggregate_series(panel, Coalition::of({0, 1}, 2)).counts, (std::vector<double>{1, 3, 3}));
  EXPECT_EQ(aggregate_series(panel, Coalition(2)).counts, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(aggregate_series(panel, Coalition::of({0}, 2)).counts, panel.series[0].counts);
  EXPECT_EQ(panel.ground_truth.counts, (std::vector<double>{1, 3, 3}));
}

TEST(AggregateSeries, FullEqualsSumOfSingletons) {
  std::mt19937_64 rng(3);
  TimeGrid grid;
  grid.n_bins = 20;
  std::vector<DemandSeries> series;
  for (int s = 0; s < 6; ++s) {
    DemandSeries d{"s" + std::to_string(s), "z", std::vector<double>(grid.n_bins)};
    for (double& x : d.counts) x = static_cast<double>(rng() % 10);
    series.push_back(d);
  }
  const auto panel = DemandPanel::from_series(grid, "z", series);
  std::vector<double> sum(grid.n_bins, 0.0);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto one = aggregate_series(panel, Coalition::of({i}, 6)).counts;
    for (std::size_t t = 0; t < sum.size(); ++t) sum[t] += one[t];
  }
  EXPECT_EQ(aggregate_series(panel, Coalition::full(6)).counts, sum);
}

TEST(DemandPanel, RejectsBadSeries) {
  TimeGrid grid;
  grid.n_bins = 2;
  EXPECT_THROW(DemandPanel::from_series(grid, "z", {{"a", "z", {1}}}), ContractError);
  EXPECT_THROW(DemandPanel::from_series(grid, "z", {{"a", "z", {1, -1}}}), ContractError);
}

class CountingGame final : public ValuationGame {
 public:
  explicit CountingGame(std::size_t n) : ValuationGame(n) {}
  mutable std::atomic<int> calls{0};

 protected:
  double evaluate(const Coalition& c) const override {
    ++calls;
    return static_cast<double>(c.size()) * 0.25;
  }
};

TEST(ValuationGame, CountsDistinctEvaluationsOnly) {
  CountingGame game(4);
  EXPECT_EQ(game.value(Coalition(4)), 0.0);
  EXPECT_EQ(game.tte(), 0u);
  for (int rep = 0; rep < 3; ++rep) {
    game.value(Coalition::of({0}, 4));
    game.value(Coalition::of({1, 2}, 4));
    game.value(Coalition::of({2, 1}, 4));
  }
  EXPECT_EQ(game.tte(), 2u);
  EXPECT_EQ(game.calls.load(), 2);
  game.reset();
  EXPECT_EQ(game.tte(), 0u);
}

TEST(ValuationGame, WithoutMemoizationEveryCallCounts) {
  CountingGame game(3);
  game.set_memoize(false);
  for (int rep = 0; rep < 4; ++rep) game.value(Coalition::of({0, 1}, 3));
  EXPECT_EQ(game.tte(), 4u);
}

TEST(ValuationGame, ConcurrentMissesCountedOnce) {
  CountingGame game(10);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (std::uint64_t mask = 1; mask < 1024; ++mask) game.value(Coalition::from_bits(mask, 10));
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(game.tte(), 1023u);
}

TEST(ValuationGame, RejectsForeignCoalitions) {
  CountingGame game(3);
  EXPECT_THROW(game.value(Coalition::of({0}, 4)), ContractError);
}

TEST(TimeGrid, BinsAndWeeks) {
  using namespace std::chrono;
  const Timestamp start = sys_days{year{2019} / 4 / 15};
  const auto grid = TimeGrid::covering(start, start + days(7));
  EXPECT_EQ(grid.n_bins, 168u);
  EXPECT_EQ(grid.bins_per_week(), 168u);
  EXPECT_EQ(grid.bin_of(start + hours(10) + minutes(30)), 10u);
  EXPECT_FALSE(grid.bin_of(start - seconds(1)).has_value());
  EXPECT_FALSE(grid.bin_of(start + days(7)).has_value());
  auto odd = grid;
  odd.bin_width = seconds(7 * 3600 + 1);
  EXPECT_THROW(odd.bins_per_week(), ConfigError);
}

}  // namespace
}  // namespace dataval
