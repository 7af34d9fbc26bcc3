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

#include "dataval/valuation.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <mutex>
#include <numeric>
#include <ostream>

#include "dataval/errors.hpp"
#include "dataval/ingest.hpp"
#include "dataval/parallel.hpp"

namespace dataval {

ForecastValueGame::ForecastValueGame(DemandPanel panel, std::shared_ptr<const Forecaster> forecaster,
                                     Metric metric)
    : ForecastValueGame(std::make_shared<const DemandPanel>(std::move(panel)), std::move(forecaster),
                        metric) {}

ForecastValueGame::ForecastValueGame(std::shared_ptr<const DemandPanel> panel,
                                     std::shared_ptr<const Forecaster> forecaster, Metric metric)
    : ValuationGame(panel->n_sources()),
      panel_(std::move(panel)),
      forecaster_(std::move(forecaster)),
      metric_(metric) {
  panel_->grid.validate_split();
  const auto& gt = panel_->ground_truth.counts;
  truth_.assign(gt.begin() + static_cast<std::ptrdiff_t>(panel_->grid.control.begin),
                gt.begin() + static_cast<std::ptrdiff_t>(panel_->grid.control.end));
}

double ForecastValueGame::evaluate(const Coalition& coalition) const {
  const auto training = aggregate_range(*panel_, coalition, panel_->grid.observation);
  Forecast forecast;
  try {
    forecast = forecaster_->fit_predict(training, panel_->grid);
  } catch (const UntrainableCoalition&) {
    return 0.0;
  }
  if (metric_ == Metric::rdtw && std::all_of(truth_.begin(), truth_.end(), [](double x) { return x == 0.0; })) {
    return 0.0;
  }
  return similarity(metric_, truth_, forecast.values);
}

TableGame::TableGame(std::size_t n_players, std::vector<double> values)
    : ValuationGame(n_players), values_(std::move(values)) {
  if (n_players > 30) throw ContractError("TableGame supports at most 30 players");
  if (values_.size() != (std::size_t{1} << n_players)) {
    throw ContractError("TableGame needs 2^n values");
  }
}

std::vector<double> exact_shapley(ValuationGame& game, const ExactOptions& options) {
  const std::size_t n = game.n_players();
  const std::size_t limit = std::min<std::size_t>(options.limit, 30);
  if (n > limit) {
    throw InfeasibleError("exact Shapley over " + std::to_string(n) +
                          " players exceeds the exact limit of " + std::to_string(limit) +
                          "; use an approximation algorithm (mc, rs, ss or their truncated forms)");
  }
  if (n == 0) return {};
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<double> values(total, 0.0);

  std::mutex progress_mutex;
  std::atomic<std::uint64_t> done{0};
  parallel_for(total - 1, options.workers, [&](std::size_t i) {
    const std::uint64_t mask = i + 1;
    values[mask] = game.value(Coalition::from_bits(mask, n));
    if (options.progress) {
      const auto d = done.fetch_add(1) + 1;
      if (d % 4096 == 0 || d == total - 1) {
        std::lock_guard lock(progress_mutex);
        options.progress(d, total - 1);
      }
    }
  });

  // weight(k) = k!(n-k-1)!/n! = 1 / (n * C(n-1, k))
  std::vector<double> weight(n);
  double binom = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    weight[k] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - k) / static_cast<double>(k + 1);
  }

  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      if (mask & bit) continue;
      acc += weight[static_cast<std::size_t>(std::popcount(mask))] * (values[mask | bit] - values[mask]);
    }
    phi[i] = acc;
  }
  return phi;
}

std::vector<double> leave_one_out(ValuationGame& game) {
  const std::size_t n = game.n_players();
  const Coalition all = Coalition::full(n);
  const double v_all = game.value(all);
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) loo[i] = v_all - game.value(all.without(i));
  return loo;
}

std::vector<double> volume_shares(const DemandPanel& panel) {
  std::vector<double> totals(panel.n_sources());
  for (std::size_t i = 0; i < totals.size(); ++i) totals[i] = panel.series[i].total();
  const double grand = std::accumulate(totals.begin(), totals.end(), 0.0);
  if (!(grand > 0.0)) throw ContractError("volume_shares: panel has no rides");
  for (double& t : totals) t /= grand;
  return totals;
}

std::vector<double> normalized_shares(const std::vector<double>& phi) {
  const double sum = std::accumulate(phi.begin(), phi.end(), 0.0);
  std::vector<double> out(phi.size(), 0.0);
  if (sum == 0.0) return out;
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = phi[i] / sum;
  return out;
}

std::string format_real(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

ValueReport make_value_report(const DemandPanel& panel, ValuationGame& game,
                              const std::vector<double>& phi, ValuationMethod method,
                              std::uint64_t tte) {
  if (phi.size() != panel.n_sources() || game.n_players() != panel.n_sources()) {
    throw ContractError("make_value_report: player counts disagree");
  }
  ValueReport report;
  report.zone = panel.zone;
  report.method = std::move(method);
  report.tte = tte;
  report.v_full = game.value(Coalition::full(panel.n_sources()));
  const auto loo = leave_one_out(game);
  const auto shares = normalized_shares(phi);
  const auto volume = volume_shares(panel);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    ValueRow row;
    row.source_id = panel.sources[i];
    row.shapley = phi[i];
    row.shapley_share = shares[i];
    row.loo = loo[i];
    row.volume_share = volume[i];
    row.rides = panel.series[i].total();
    row.rides_pct = 100.0 * volume[i];
    report.rows.push_back(std::move(row));
  }
  return report;
}

void ValueReport::write_csv(std::ostream& out) const {
  out << "source_id,shapley,shapley_share,loo,volume_share,rides,rides_pct\n";
  for (const auto& r : rows) {
    out << csv_field(r.source_id) << ',' << format_real(r.shapley) << ','
        << format_real(r.shapley_share) << ',' << format_real(r.loo) << ','
        << format_real(r.volume_share) << ',' << format_real(r.rides) << ','
        << format_real(r.rides_pct) << '\n';
  }
}

nlohmann::ordered_json ValueReport::to_json() const {
  nlohmann::ordered_json j;
  auto& m = j["method"];
  m["algorithm"] = method.algorithm;
  m["metric"] = method.metric;
  if (method.rounds) m["rounds"] = *method.rounds;
  if (method.tau) m["tau"] = *method.tau;
  if (method.convergence_threshold) m["convergence_threshold"] = *method.convergence_threshold;
  if (method.seed) m["seed"] = *method.seed;
  j["zone"] = zone;
  j["v_full"] = v_full;
  j["tte"] = tte;
  auto& arr = j["sources"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"source_id", r.source_id},
                   {"shapley", r.shapley},
                   {"shapley_share", r.shapley_share},
                   {"loo", r.loo},
                   {"volume_share", r.volume_share},
                   {"rides", r.rides},
                   {"rides_pct", r.rides_pct}});
  }
  return j;
}

}  // namespace dataval
