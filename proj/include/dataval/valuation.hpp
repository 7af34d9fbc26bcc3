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

#ifndef DATAVAL_VALUATION_HPP
#define DATAVAL_VALUATION_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dataval/core.hpp"
#include "dataval/forecast.hpp"

namespace dataval {

/// v(K) = metric(ground truth over the control window, forecast trained on
/// the aggregate of K over the observation window). Untrainable coalitions
/// score 0.
class ForecastValueGame final : public ValuationGame {
 public:
  ForecastValueGame(DemandPanel panel, std::shared_ptr<const Forecaster> forecaster, Metric metric);
  ForecastValueGame(std::shared_ptr<const DemandPanel> panel,
                    std::shared_ptr<const Forecaster> forecaster, Metric metric);

  const DemandPanel& panel() const { return *panel_; }
  Metric metric() const { return metric_; }
  const Forecaster& forecaster() const { return *forecaster_; }

 protected:
  double evaluate(const Coalition& coalition) const override;

 private:
  std::shared_ptr<const DemandPanel> panel_;
  std::shared_ptr<const Forecaster> forecaster_;
  Metric metric_;
  std::vector<double> truth_;
};

/// Wraps a callable as a game; handy for oracles and bindings.
class FunctionGame final : public ValuationGame {
 public:
  using Fn = std::function<double(const Coalition&)>;
  FunctionGame(std::size_t n_players, Fn fn) : ValuationGame(n_players), fn_(std::move(fn)) {}

 protected:
  double evaluate(const Coalition& coalition) const override { return fn_(coalition); }

 private:
  Fn fn_;
};

/// Explicit game over at most 30 players: values[mask] is v of the
/// coalition with those bits. values[0] is ignored (v(empty) = 0).
class TableGame final : public ValuationGame {
 public:
  TableGame(std::size_t n_players, std::vector<double> values);

 protected:
  double evaluate(const Coalition& coalition) const override { return values_[coalition.bits()]; }

 private:
  std::vector<double> values_;
};

inline constexpr std::size_t kDefaultExactLimit = 20;

struct ExactOptions {
  std::size_t limit = kDefaultExactLimit;
  std::size_t workers = 1;
  /// Called with (evaluated, total) every few thousand coalitions.
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

/// Exact Shapley values by subset enumeration with weights
/// |K|! (n-|K|-1)! / n!. Every coalition is evaluated once through the
/// game's cache. Accumulation runs in subset-rank order, so results do not
/// depend on the worker count. Throws InfeasibleError when n exceeds the
/// limit (capped at 30).
std::vector<double> exact_shapley(ValuationGame& game, const ExactOptions& options = {});

/// v(N) - v(N \ {i}) for each player; costs n + 1 evaluations.
std::vector<double> leave_one_out(ValuationGame& game);

/// Per-source share of all rides on the grid. Throws ContractError for an
/// empty panel.
std::vector<double> volume_shares(const DemandPanel& panel);

/// phi_i / sum_j phi_j; all zeros when the sum is zero.
std::vector<double> normalized_shares(const std::vector<double>& phi);

struct ValuationMethod {
  std::string algorithm = "exact";
  std::optional<std::size_t> rounds;
  std::optional<double> tau;
  std::optional<double> convergence_threshold;
  std::optional<std::uint64_t> seed;
  std::string metric = "cossim";
};

struct ValueRow {
  SourceId source_id;
  double shapley = 0.0;
  double shapley_share = 0.0;
  double loo = 0.0;
  double volume_share = 0.0;
  double rides = 0.0;
  double rides_pct = 0.0;
};

struct ValueReport {
  ZoneId zone;
  std::vector<ValueRow> rows;
  double v_full = 0.0;
  ValuationMethod method;
  std::uint64_t tte = 0;

  void write_csv(std::ostream& out) const;
  nlohmann::ordered_json to_json() const;
};

/// Assembles the report; computes LOO and volumes from `game` and `panel`.
ValueReport make_value_report(const DemandPanel& panel, ValuationGame& game,
                              const std::vector<double>& phi, ValuationMethod method,
                              std::uint64_t tte);

/// Round-trip decimal formatting used by every CSV writer.
std::string format_real(double x);

}  // namespace dataval

#endif  // DATAVAL_VALUATION_HPP
