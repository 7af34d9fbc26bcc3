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

#include "dataval/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dataval/errors.hpp"
#include "dataval/rng.hpp"

namespace dataval {
namespace {

double gaussian(Rng& rng) {
  // Box-Muller on our own uniform draws keeps the stream portable.
  const double u1 = 1.0 - uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double bump(double x, double center, double width) {
  const double d = (x - center) / width;
  return std::exp(-0.5 * d * d);
}

std::vector<double> noisy_copy(const std::vector<double>& shape, double rate, std::size_t n_bins,
                               const PanelSpec& spec, Rng& rng) {
  std::vector<double> out(n_bins);
  for (std::size_t t = 0; t < n_bins; ++t) {
    double x = rate * shape[t % shape.size()];
    if (spec.noise_sigma > 0.0) x *= std::max(0.0, 1.0 + spec.noise_sigma * gaussian(rng));
    if (spec.integer_counts) x = std::round(x);
    out[t] = x;
  }
  return out;
}

DemandPanel panel_from_rows(const PanelSpec& spec, const ZoneId& zone,
                            std::vector<std::vector<double>> rows) {
  const TimeGrid grid = synthetic_grid(spec);
  std::vector<DemandSeries> series;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    series.push_back(DemandSeries{"S" + std::to_string(i), zone, std::move(rows[i])});
  }
  return DemandPanel::from_series(grid, zone, std::move(series));
}

}  // namespace

AdditiveGame::AdditiveGame(std::vector<double> weights)
    : ValuationGame(weights.size()), weights_(std::move(weights)) {}

double AdditiveGame::evaluate(const Coalition& coalition) const {
  double v = 0.0;
  for (std::size_t m : coalition.members()) v += weights_[m];
  return v;
}

UnanimityGame::UnanimityGame(std::size_t n_players, std::vector<std::size_t> carrier)
    : ValuationGame(n_players), carrier_(Coalition::of(carrier, n_players)) {
  if (carrier_.empty()) throw ContractError("unanimity carrier must be non-empty");
}

double UnanimityGame::evaluate(const Coalition& coalition) const {
  const auto& want = carrier_.key().words;
  const auto& have = coalition.key().words;
  for (std::size_t w = 0; w < want.size(); ++w) {
    if ((have[w] & want[w]) != want[w]) return 0.0;
  }
  return 1.0;
}

std::unique_ptr<UnanimityGame> complementary_pair_game() {
  return std::make_unique<UnanimityGame>(2, std::vector<std::size_t>{0, 1});
}

SaturatingGame::SaturatingGame(SaturatingParams params, std::uint64_t seed)
    : ValuationGame(params.n_players), params_(params), heavy_(params.n_players) {
  if (params.heavy_count > params.n_players) throw ContractError("heavy_count exceeds n_players");
  if (!(params.beta > 0.0 && params.beta <= 1.0)) throw ContractError("beta must lie in (0, 1]");
  Rng rng(seed);
  std::vector<std::size_t> order(params.n_players);
  std::iota(order.begin(), order.end(), std::size_t{0});
  fisher_yates_shuffle(std::span<std::size_t>(order), rng);
  for (std::size_t i = 0; i < params.heavy_count; ++i) heavy_.insert(order[i]);
  noise_.resize(params.n_players);
  for (double& x : noise_) x = params.noise_scale * uniform_unit(rng);
}

SaturatingGame::SaturatingGame(SaturatingParams params, std::vector<std::size_t> heavy,
                               std::vector<double> noise)
    : ValuationGame(params.n_players),
      params_(params),
      heavy_(Coalition::of(heavy, params.n_players)),
      noise_(std::move(noise)) {
  if (noise_.size() != params.n_players) throw ContractError("noise needs one entry per player");
  params_.heavy_count = heavy_.size();
}

double SaturatingGame::evaluate(const Coalition& coalition) const {
  std::size_t h = 0;
  double extra = 0.0;
  for (std::size_t m : coalition.members()) {
    if (heavy_.contains(m)) ++h;
    extra += noise_[m];
  }
  return params_.v_max * (1.0 - std::pow(1.0 - params_.beta, static_cast<double>(h))) + extra;
}

std::vector<double> SaturatingGame::closed_form_shapley() const {
  const auto h = static_cast<double>(heavy_.size());
  const double share =
      h > 0 ? params_.v_max * (1.0 - std::pow(1.0 - params_.beta, h)) / h : 0.0;
  std::vector<double> phi(noise_);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (heavy_.contains(i)) phi[i] += share;
  }
  return phi;
}

SaturatingParams default_saturating_params() { return SaturatingParams{}; }

SaturatingParams early_saturating_params() {
  SaturatingParams p;
  p.heavy_count = 14;
  p.beta = 0.75;
  return p;
}

std::vector<double> weekly_demand_shape(std::size_t bins_per_week, std::uint64_t seed) {
  if (bins_per_week == 0 || bins_per_week % 7 != 0) {
    throw ContractError("bins per week must be a positive multiple of 7");
  }
  const std::size_t per_day = bins_per_week / 7;
  Rng rng(seed);
  std::vector<double> shape(bins_per_week);
  for (std::size_t b = 0; b < bins_per_week; ++b) {
    const std::size_t day = b / per_day;
    const double hour = 24.0 * static_cast<double>(b % per_day) / static_cast<double>(per_day);
    const bool weekend = day >= 5;
    double x = 0.15;
    if (weekend) {
      x += 0.9 * bump(hour, 13.0, 4.0) + 0.6 * bump(hour, 23.0, 2.0) + 0.4 * bump(hour, 1.0, 1.5);
    } else {
      x += 1.0 * bump(hour, 8.5, 1.5) + 1.2 * bump(hour, 18.0, 2.0) + 0.5 * bump(hour, 13.0, 3.0);
    }
    x *= 1.0 + 0.1 * (uniform_unit(rng) - 0.5);
    shape[b] = x;
  }
  const double mean = std::accumulate(shape.begin(), shape.end(), 0.0) / static_cast<double>(bins_per_week);
  for (double& x : shape) x /= mean;
  return shape;
}

TimeGrid synthetic_grid(const PanelSpec& spec) {
  using namespace std::chrono;
  const auto week = hours(24 * 7);
  const auto total = static_cast<long long>(spec.observation_weeks + spec.control_weeks);
  TimeGrid grid = TimeGrid::covering(spec.start, spec.start + week * total, hours(1));
  const std::size_t split = spec.observation_weeks * grid.bins_per_week();
  grid.observation = BinRange{0, split};
  grid.control = BinRange{split, grid.n_bins};
  return grid;
}

DemandPanel scaled_copies_panel(const std::vector<double>& shape, const std::vector<double>& rates,
                                const PanelSpec& spec, const ZoneId& zone) {
  const TimeGrid grid = synthetic_grid(spec);
  Rng rng(spec.seed);
  std::vector<std::vector<double>> rows;
  for (double rate : rates) rows.push_back(noisy_copy(shape, rate, grid.n_bins, spec, rng));
  return panel_from_rows(spec, zone, std::move(rows));
}

DemandPanel complementary_pair_panel(const PanelSpec& spec, double rate) {
  const TimeGrid grid = synthetic_grid(spec);
  const std::size_t period = grid.bins_per_week();
  const auto shape = weekly_demand_shape(period, spec.seed);
  std::vector<double> first(period, 0.0), second(period, 0.0);
  for (std::size_t b = 0; b < period; ++b) (b < period / 2 ? first : second)[b] = shape[b];
  Rng rng(spec.seed);
  std::vector<std::vector<double>> rows;
  rows.push_back(noisy_copy(first, rate, grid.n_bins, spec, rng));
  rows.push_back(noisy_copy(second, rate, grid.n_bins, spec, rng));
  return panel_from_rows(spec, kCityWide, std::move(rows));
}

DemandPanel night_coverage_panel(const PanelSpec& spec) {
  const TimeGrid grid = synthetic_grid(spec);
  const std::size_t period = grid.bins_per_week();
  const std::size_t per_day = period / 7;
  // Daytime service 06:00-24:00 with a gentle midday swell; the night
  // source serves a single 02:00 closing-time peak.
  std::vector<double> day(period, 0.0), night(period, 0.0);
  for (std::size_t b = 0; b < period; ++b) {
    const double hour = 24.0 * static_cast<double>(b % per_day) / static_cast<double>(per_day);
    if (hour >= 6.0) day[b] = 1.0 + 0.2 * std::sin(std::numbers::pi * (hour - 6.0) / 18.0);
    if (hour >= 2.0 && hour < 3.0) night[b] = 1.0;
  }
  const double day_hours = std::accumulate(day.begin(), day.end(), 0.0) / 7.0;
  Rng rng(spec.seed);
  std::vector<std::vector<double>> rows;
  // Daily rides per day source; the night source brings 60 per day, less
  // than any of them.
  for (double daily : {80.0, 76.0, 72.0, 68.0, 64.0}) {
    rows.push_back(noisy_copy(day, daily / day_hours, grid.n_bins, spec, rng));
  }
  rows.push_back(noisy_copy(night, 60.0, grid.n_bins, spec, rng));
  return panel_from_rows(spec, kCityWide, std::move(rows));
}

DemandPanel distinct_shapes_panel(const PanelSpec& spec) {
  const TimeGrid grid = synthetic_grid(spec);
  const std::size_t period = grid.bins_per_week();
  const std::size_t per_day = period / 7;
  std::vector<std::vector<double>> shapes(4, std::vector<double>(period, 0.0));
  for (std::size_t b = 0; b < period; ++b) {
    const std::size_t d = b / per_day;
    const double hour = 24.0 * static_cast<double>(b % per_day) / static_cast<double>(per_day);
    shapes[0][b] = 0.1 + bump(hour, 8.0, 1.5);
    shapes[1][b] = 0.1 + bump(hour, 18.0, 2.0);
    shapes[2][b] = d >= 5 ? 0.2 + bump(hour, 14.0, 4.0) : 0.05;
    shapes[3][b] = 0.05 + bump(hour, 1.0, 1.5) + bump(hour, 23.5, 1.0);
  }
  Rng rng(spec.seed);
  std::vector<std::vector<double>> rows;
  const double rates[] = {12.0, 9.0, 6.0, 3.0};
  for (std::size_t i = 0; i < 4; ++i) rows.push_back(noisy_copy(shapes[i], rates[i], grid.n_bins, spec, rng));
  return panel_from_rows(spec, kCityWide, std::move(rows));
}

std::vector<TripRecord> panel_to_trips(const DemandPanel& panel) {
  std::vector<TripRecord> trips;
  for (const auto& s : panel.series) {
    for (std::size_t t = 0; t < s.counts.size(); ++t) {
      const auto rides = static_cast<long long>(std::llround(s.counts[t]));
      const Timestamp bin = panel.grid.bin_start(t);
      for (long long k = 0; k < rides; ++k) {
        const auto offset = std::chrono::seconds((k * 61) % panel.grid.bin_width.count());
        trips.push_back(TripRecord{bin + offset, s.source, panel.zone});
      }
    }
  }
  std::stable_sort(trips.begin(), trips.end(),
                   [](const TripRecord& a, const TripRecord& b) { return a.start_time < b.start_time; });
  return trips;
}

}  // namespace dataval
