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

#include "dataval/core.hpp"

#include <bit>
#include <mutex>
#include <numeric>
#include <string>

#include "dataval/errors.hpp"

namespace dataval {

TimeGrid TimeGrid::covering(Timestamp start, Timestamp end, std::chrono::seconds bin_width) {
  if (bin_width.count() <= 0) throw ConfigError("bin width must be positive");
  if (end <= start) throw ConfigError("grid end must be after grid start");
  TimeGrid grid;
  grid.start = start;
  grid.bin_width = bin_width;
  const auto span = (end - start).count();
  grid.n_bins = static_cast<std::size_t>((span + bin_width.count() - 1) / bin_width.count());
  return grid;
}

std::optional<std::size_t> TimeGrid::bin_of(Timestamp t) const {
  if (t < start) return std::nullopt;
  const auto offset = (t - start).count() / bin_width.count();
  if (static_cast<std::size_t>(offset) >= n_bins) return std::nullopt;
  return static_cast<std::size_t>(offset);
}

std::size_t TimeGrid::bins_per_week() const {
  constexpr long long kWeek = 7LL * 24 * 3600;
  if (kWeek % bin_width.count() != 0) {
    throw ConfigError("bin width " + std::to_string(bin_width.count()) +
                      "s does not divide one week");
  }
  return static_cast<std::size_t>(kWeek / bin_width.count());
}

void TimeGrid::validate_split() const {
  if (control.empty()) throw ConfigError("control window is empty");
  if (observation.empty()) throw ConfigError("observation window is empty");
  if (observation.end != control.begin) {
    throw ConfigError("observation window must end where the control window begins");
  }
  if (observation.begin != 0 || control.end != n_bins) {
    throw ConfigError("observation and control windows must cover the grid");
  }
}

double DemandSeries::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

DemandPanel DemandPanel::from_series(TimeGrid grid, ZoneId zone, std::vector<DemandSeries> series) {
  DemandPanel panel;
  panel.grid = grid;
  panel.zone = std::move(zone);
  panel.ground_truth.source = "ALL";
  panel.ground_truth.zone = panel.zone;
  panel.ground_truth.counts.assign(grid.n_bins, 0.0);
  for (auto& s : series) {
    if (s.counts.size() != grid.n_bins) {
      throw ContractError("series for source '" + s.source + "' has " +
                          std::to_string(s.counts.size()) + " bins, grid has " +
                          std::to_string(grid.n_bins));
    }
    for (std::size_t t = 0; t < grid.n_bins; ++t) {
      if (!(s.counts[t] >= 0.0)) {
        throw ContractError("series for source '" + s.source + "' has a negative count");
      }
      panel.ground_truth.counts[t] += s.counts[t];
    }
    s.zone = panel.zone;
    panel.sources.push_back(s.source);
  }
  panel.series = std::move(series);
  return panel;
}

std::size_t CoalitionKeyHash::operator()(const CoalitionKey& key) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ key.words.size();
  for (std::uint64_t w : key.words) {
    w ^= w >> 33;
    w *= 0xff51afd7ed558ccdULL;
    w ^= w >> 33;
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

Coalition::Coalition(std::size_t n_players) : n_players_(n_players) {
  key_.words.assign((n_players + 63) / 64, 0);
}

Coalition Coalition::of(std::span<const std::size_t> members, std::size_t n_players) {
  Coalition c(n_players);
  for (std::size_t m : members) c.insert(m);
  return c;
}

Coalition Coalition::of(std::initializer_list<std::size_t> members, std::size_t n_players) {
  return of(std::span<const std::size_t>(members.begin(), members.size()), n_players);
}

Coalition Coalition::full(std::size_t n_players) {
  Coalition c(n_players);
  for (std::size_t i = 0; i < n_players; ++i) c.insert(i);
  return c;
}

Coalition Coalition::from_bits(std::uint64_t mask, std::size_t n_players) {
  if (n_players > 64) throw ContractError("from_bits requires at most 64 players");
  if (n_players < 64 && (mask >> n_players) != 0) {
    throw OutOfRangeError("mask has bits beyond player count");
  }
  Coalition c(n_players);
  if (n_players > 0) c.key_.words[0] = mask;
  return c;
}

std::size_t Coalition::size() const {
  std::size_t n = 0;
  for (std::uint64_t w : key_.words) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

void Coalition::check(std::size_t player) const {
  if (player >= n_players_) {
    throw OutOfRangeError("player index " + std::to_string(player) + " out of range for " +
                          std::to_string(n_players_) + " players");
  }
}

bool Coalition::contains(std::size_t player) const {
  if (player >= n_players_) return false;
  return (key_.words[player / 64] >> (player % 64)) & 1U;
}

void Coalition::insert(std::size_t player) {
  check(player);
  key_.words[player / 64] |= std::uint64_t{1} << (player % 64);
}

void Coalition::erase(std::size_t player) {
  check(player);
  key_.words[player / 64] &= ~(std::uint64_t{1} << (player % 64));
}

Coalition Coalition::with(std::size_t player) const {
  Coalition c = *this;
  c.insert(player);
  return c;
}

Coalition Coalition::without(std::size_t player) const {
  Coalition c = *this;
  c.erase(player);
  return c;
}

std::vector<std::size_t> Coalition::members() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (std::size_t w = 0; w < key_.words.size(); ++w) {
    std::uint64_t bits = key_.words[w];
    while (bits != 0) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

std::uint64_t Coalition::bits() const {
  if (n_players_ > 64) throw ContractError("bits() requires at most 64 players");
  return key_.words.empty() ? 0 : key_.words[0];
}

std::vector<double> aggregate_range(const DemandPanel& panel, const Coalition& coalition,
                                    BinRange range) {
  if (coalition.n_players() != panel.n_sources()) {
    throw ContractError("coalition is over " + std::to_string(coalition.n_players()) +
                        " players, panel has " + std::to_string(panel.n_sources()) + " sources");
  }
  if (range.end > panel.grid.n_bins) throw ContractError("range exceeds grid");
  std::vector<double> out(range.size(), 0.0);
  for (std::size_t m : coalition.members()) {
    const auto& counts = panel.series[m].counts;
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += counts[range.begin + t];
  }
  return out;
}

DemandSeries aggregate_series(const DemandPanel& panel, const Coalition& coalition) {
  DemandSeries s;
  s.source = "COALITION";
  s.zone = panel.zone;
  s.counts = aggregate_range(panel, coalition, BinRange{0, panel.grid.n_bins});
  return s;
}

double ValuationGame::value(const Coalition& coalition) {
  if (coalition.n_players() != n_players_) {
    throw ContractError("coalition is over " + std::to_string(coalition.n_players()) +
                        " players, game has " + std::to_string(n_players_));
  }
  if (coalition.empty()) return 0.0;
  if (!memoize_) {
    tte_.fetch_add(1, std::memory_order_relaxed);
    return evaluate(coalition);
  }
  {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(coalition.key()); it != cache_.end()) return it->second;
  }
  const double v = evaluate(coalition);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.emplace(coalition.key(), v);
  if (inserted) tte_.fetch_add(1, std::memory_order_relaxed);
  return it->second;
}

void ValuationGame::reset() {
  std::unique_lock lock(mutex_);
  cache_.clear();
  tte_.store(0, std::memory_order_relaxed);
}

void ValuationGame::set_memoize(bool memoize) {
  std::unique_lock lock(mutex_);
  memoize_ = memoize;
  cache_.clear();
}

}  // namespace dataval
