// Copyright 2026 The dataval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DATAVAL_CORE_HPP
#define DATAVAL_CORE_HPP

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dataval {

using Timestamp = std::chrono::sys_seconds;
using SourceId = std::string;
using ZoneId = std::string;

/// Zone id of a panel built without a zone filter.
inline const ZoneId kCityWide = "CITY_WIDE";

/// Half-open interval of bin indices.
struct BinRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return size() == 0; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool operator==(const BinRange&) const = default;
};

/// A regular time grid split into an observation window followed by a
/// control window.
struct TimeGrid {
  Timestamp start{};
  std::chrono::seconds bin_width{3600};
  std::size_t n_bins = 0;
  BinRange observation;
  BinRange control;

  /// Grid covering [start, end) with no split; n_bins rounds up.
  static TimeGrid covering(Timestamp start, Timestamp end,
                           std::chrono::seconds bin_width = std::chrono::hours(1));

  Timestamp bin_start(std::size_t bin) const { return start + bin_width * static_cast<long long>(bin); }
  Timestamp end() const { return bin_start(n_bins); }

  /// Bin containing `t`, or nullopt outside the grid.
  std::optional<std::size_t> bin_of(Timestamp t) const;

  /// Number of bins in one week. Throws ConfigError if a week is not a
  /// whole number of bins.
  std::size_t bins_per_week() const;

  bool is_split() const { return !control.empty(); }

  /// Throws ConfigError unless the windows are adjacent, observation first,
  /// and control non-empty and ending at n_bins.
  void validate_split() const;

  bool operator==(const TimeGrid&) const = default;
};

struct DemandSeries {
  SourceId source;
  ZoneId zone;
  std::vector<double> counts;

  double total() const;
};

/// All sources active in one zone on a common grid. The order of `sources`
/// defines player indices for coalitions over this panel.
struct DemandPanel {
  TimeGrid grid;
  ZoneId zone = kCityWide;
  std::vector<SourceId> sources;
  std::vector<DemandSeries> series;
  DemandSeries ground_truth;

  std::size_t n_sources() const { return series.size(); }

  /// Builds a panel and its ground truth from per-source series. Throws
  /// ContractError when lengths disagree with the grid or counts are
  /// negative.
  static DemandPanel from_series(TimeGrid grid, ZoneId zone, std::vector<DemandSeries> series);
};

/// Canonical encoding of a member set: a little-endian bitset in 64-bit
/// words, sized by the player count. Equal member sets give equal keys
/// regardless of insertion order.
struct CoalitionKey {
  std::vector<std::uint64_t> words;

  bool operator==(const CoalitionKey&) const = default;
};

struct CoalitionKeyHash {
  std::size_t operator()(const CoalitionKey& key) const noexcept;
};

class Coalition {
 public:
  Coalition() = default;
  explicit Coalition(std::size_t n_players);

  /// Deduplicates `members`. Throws OutOfRangeError on an index >= n_players.
  static Coalition of(std::span<const std::size_t> members, std::size_t n_players);
  static Coalition of(std::initializer_list<std::size_t> members, std::size_t n_players);
  static Coalition full(std::size_t n_players);
  /// Players whose bits are set in `mask`; requires n_players <= 64.
  static Coalition from_bits(std::uint64_t mask, std::size_t n_players);

  std::size_t n_players() const { return n_players_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  bool contains(std::size_t player) const;

  void insert(std::size_t player);
  void erase(std::size_t player);
  Coalition with(std::size_t player) const;
  Coalition without(std::size_t player) const;

  /// Members in increasing index order.
  std::vector<std::size_t> members() const;
  const CoalitionKey& key() const { return key_; }
  /// Single-word key; throws ContractError when n_players > 64.
  std::uint64_t bits() const;

  bool operator==(const Coalition&) const = default;

 private:
  void check(std::size_t player) const;

  std::size_t n_players_ = 0;
  CoalitionKey key_;
};

/// Element-wise sum of the coalition members' series; the empty coalition
/// gives zeros over the grid.
DemandSeries aggregate_series(const DemandPanel& panel, const Coalition& coalition);

/// Same as aggregate_series restricted to `range`, returned as raw values.
std::vector<double> aggregate_range(const DemandPanel& panel, const Coalition& coalition,
                                    BinRange range);

/// A coalition game v with memoization and a count of distinct evaluations
/// (TtE). v(empty) is 0 and is never evaluated or counted.
///
/// value() may be called concurrently. Concurrent misses on one key may both
/// compute; the first insert wins and only it is counted.
class ValuationGame {
 public:
  explicit ValuationGame(std::size_t n_players) : n_players_(n_players) {}
  virtual ~ValuationGame() = default;

  ValuationGame(const ValuationGame&) = delete;
  ValuationGame& operator=(const ValuationGame&) = delete;

  std::size_t n_players() const { return n_players_; }

  double value(const Coalition& coalition);
  double value_of(std::span<const std::size_t> members) {
    return value(Coalition::of(members, n_players_));
  }

  std::uint64_t tte() const { return tte_.load(std::memory_order_relaxed); }

  /// Drops cached values and zeroes the evaluation counter.
  void reset();

  /// With memoization off every non-empty value() call evaluates and counts.
  void set_memoize(bool memoize);
  bool memoize() const { return memoize_; }

 protected:
  /// Called only for non-empty coalitions. Must be deterministic and safe to
  /// call concurrently.
  virtual double evaluate(const Coalition& coalition) const = 0;

 private:
  std::size_t n_players_;
  bool memoize_ = true;
  mutable std::shared_mutex mutex_;
  std::unordered_map<CoalitionKey, double, CoalitionKeyHash> cache_;
  std::atomic<std::uint64_t> tte_{0};
};

}  // namespace dataval

#endif  // DATAVAL_CORE_HPP
