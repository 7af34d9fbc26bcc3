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

#ifndef DATAVAL_SYNTHETIC_HPP
#define DATAVAL_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "dataval/core.hpp"
#include "dataval/ingest.hpp"

namespace dataval {

/// v(K) = sum of member weights.
class AdditiveGame final : public ValuationGame {
 public:
  explicit AdditiveGame(std::vector<double> weights);
  const std::vector<double>& weights() const { return weights_; }

 protected:
  double evaluate(const Coalition& coalition) const override;

 private:
  std::vector<double> weights_;
};

/// v(K) = 1 when K contains every carrier member, else 0. With a two-member
/// carrier this is the complementary pair: each member alone is worthless.
class UnanimityGame final : public ValuationGame {
 public:
  UnanimityGame(std::size_t n_players, std::vector<std::size_t> carrier);

 protected:
  double evaluate(const Coalition& coalition) const override;

 private:
  Coalition carrier_;
};

/// Two players, v({0, 1}) = 1 and 0 otherwise.
std::unique_ptr<UnanimityGame> complementary_pair_game();

struct SaturatingParams {
  std::size_t n_players = 16;
  std::size_t heavy_count = 10;
  double v_max = 1.0;
  double beta = 0.3;
  /// Per-player noise terms are drawn uniformly from [0, noise_scale].
  double noise_scale = 0.004;
};

/// v(K) = v_max * (1 - (1 - beta)^|K & H|) + sum_{i in K} noise_i for a
/// heavy subset H. A heavy player's marginal depends on how many heavy
/// players precede it, so value is strongly position dependent.
class SaturatingGame final : public ValuationGame {
 public:
  SaturatingGame(SaturatingParams params, std::uint64_t seed);
  SaturatingGame(SaturatingParams params, std::vector<std::size_t> heavy, std::vector<double> noise);

  const SaturatingParams& params() const { return params_; }
  const Coalition& heavy() const { return heavy_; }
  const std::vector<double>& noise() const { return noise_; }

  /// Closed form: heavy players split the saturating term equally; noise
  /// terms are additive.
  std::vector<double> closed_form_shapley() const;

 protected:
  double evaluate(const Coalition& coalition) const override;

 private:
  SaturatingParams params_;
  Coalition heavy_;
  std::vector<double> noise_;
};

/// Preset used by the approximator benchmarks: 16 players, heavy count 10.
SaturatingParams default_saturating_params();
/// Preset that crosses 95% of v(N) after a handful of heavy players: 16
/// players, heavy count 14, beta 0.75.
SaturatingParams early_saturating_params();

/// A weekly demand shape with morning and evening peaks and quieter
/// weekends; mean 1.
std::vector<double> weekly_demand_shape(std::size_t bins_per_week, std::uint64_t seed);

struct PanelSpec {
  std::size_t observation_weeks = 4;
  std::size_t control_weeks = 2;
  Timestamp start = std::chrono::sys_days{std::chrono::year{2019} / 3 / 4};
  /// Multiplicative noise: each bin is scaled by max(0, 1 + sigma * z).
  double noise_sigma = 0.0;
  /// Round counts to whole rides.
  bool integer_counts = false;
  std::uint64_t seed = 0;
};

/// Hourly grid of observation_weeks + control_weeks weeks, split between
/// them.
TimeGrid synthetic_grid(const PanelSpec& spec);

/// Sources are scaled copies of `shape` (repeated weekly) with the given
/// per-hour rates, each with independent noise.
DemandPanel scaled_copies_panel(const std::vector<double>& shape, const std::vector<double>& rates,
                                const PanelSpec& spec, const ZoneId& zone = kCityWide);

/// Two sources; the first covers the first half of every week, the second
/// the rest.
DemandPanel complementary_pair_panel(const PanelSpec& spec, double rate = 10.0);

/// Five daytime sources with similar shapes and one low-volume source that
/// alone serves a late-night peak.
DemandPanel night_coverage_panel(const PanelSpec& spec);

/// Four sources with distinct weekly shapes.
DemandPanel distinct_shapes_panel(const PanelSpec& spec);

/// Expands integer counts into one trip per ride at the bin start.
std::vector<TripRecord> panel_to_trips(const DemandPanel& panel);

}  // namespace dataval

#endif  // DATAVAL_SYNTHETIC_HPP
