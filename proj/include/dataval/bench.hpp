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

#ifndef DATAVAL_BENCH_HPP
#define DATAVAL_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dataval/approx.hpp"
#include "dataval/core.hpp"
#include "dataval/forecast.hpp"

namespace dataval {

inline constexpr double kPercentGuard = 1e-6;

struct ApproximatorEvaluation {
  AlgorithmSpec spec;
  std::size_t repetitions = 0;
  double aaae = 0.0;
  double aape = 0.0;
  double aastd = 0.0;
  double mean_tte = 0.0;
  double mean_permutations = 0.0;
  /// Per-repetition estimates, in repetition order.
  std::vector<std::vector<double>> estimates;
};

struct EvaluationOptions {
  std::size_t workers = 1;
  /// Keep the game's cache across repetitions. When off, each repetition
  /// starts from an empty cache.
  bool reuse_cache = false;
};

/// Runs `spec` `repetitions` times with seeds derive_seed(master_seed, rep)
/// and scores the estimates against exact_phi:
///   AAAE  = mean over reps of mean over players of |phi_hat - phi|
///   AAPE  = same with |phi_hat - phi| / |phi| over players with |phi| > 1e-6
///   AASTD = mean over players of the sample std-dev across reps
/// Throws ContractError for fewer than 2 repetitions.
ApproximatorEvaluation evaluate_approximator(ValuationGame& game, const AlgorithmSpec& spec,
                                             std::size_t repetitions,
                                             const std::vector<double>& exact_phi,
                                             std::uint64_t master_seed,
                                             const EvaluationOptions& options = {});

inline constexpr double kDefaultAccuracyFloor = 0.60;

struct CooperationAnalysis {
  ZoneId zone;
  std::size_t n_sources = 0;
  double v_all = 0.0;
  std::vector<double> solo;
  double mean_solo = 0.0;
  /// v_all - mean solo value; empty when v_all is below the accuracy floor.
  std::optional<double> benefit;
  bool forecastable = false;
  /// (threshold, sources with v_all - v({i}) >= threshold), in input order.
  std::vector<std::pair<double, std::size_t>> willing;
};

/// Evaluates v(N) and every singleton. Throws ContractError for fewer than
/// 2 players.
CooperationAnalysis cooperation_benefit(ValuationGame& game, const ZoneId& zone,
                                        const std::vector<double>& thresholds,
                                        double accuracy_floor = kDefaultAccuracyFloor);

/// Per-zone sweep over forecast-value games built from `panels`.
std::vector<CooperationAnalysis> cooperation_benefit(const std::vector<DemandPanel>& panels,
                                                     std::shared_ptr<const Forecaster> forecaster,
                                                     Metric metric,
                                                     const std::vector<double>& thresholds,
                                                     double accuracy_floor = kDefaultAccuracyFloor);

struct CurvePoint {
  std::size_t k = 0;
  double probability = 0.0;
  std::size_t samples = 0;
};

/// For each k, the fraction of samples_per_k uniform k-subsets with
/// v(K) >= target_fraction * v(N). Subsets for the i-th k come from the
/// stream derive_seed(seed, i).
std::vector<CurvePoint> accuracy_probability_curve(ValuationGame& game,
                                                   const std::vector<std::size_t>& k_values,
                                                   std::size_t samples_per_k, double target_fraction,
                                                   std::uint64_t seed, std::size_t workers = 1);

/// Uniform k-subset drawn by a partial Fisher-Yates pass over 0..n-1.
std::vector<std::size_t> sample_subset(std::size_t n, std::size_t k, Rng& rng);

struct PimsResult {
  bool success = false;
  std::vector<std::size_t> selected;
  double value = 0.0;
  std::size_t batches_used = 0;
};

/// Shuffles the players once with `seed` and buys consecutive disjoint
/// batches of that order until v(selected) >= accuracy_target, the batch
/// budget is spent, or no players remain.
PimsResult pims_select(ValuationGame& game, double accuracy_target, std::size_t batch_size,
                       std::size_t max_batches, std::uint64_t seed);

/// Squared Pearson correlation; 1 when both inputs are constant and equal,
/// 0 when exactly one is constant.
double coefficient_of_determination(const std::vector<double>& a, const std::vector<double>& b);

/// |top-k(a) & top-k(b)| / k, ranking by value descending then index.
double top_k_agreement(const std::vector<double>& a, const std::vector<double>& b, std::size_t k);

struct MetricComparison {
  std::vector<Metric> metrics;
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<double>> shares;
  struct Pair {
    Metric a;
    Metric b;
    double r2 = 0.0;
    double top_k_agreement = 0.0;
  };
  std::vector<Pair> pairs;
  std::size_t top_k = 4;
};

MetricComparison metric_cross_validation(const DemandPanel& panel,
                                         std::shared_ptr<const Forecaster> forecaster,
                                         const AlgorithmSpec& spec, const std::vector<Metric>& metrics,
                                         std::uint64_t seed, std::size_t top_k = 4,
                                         std::size_t workers = 1);

}  // namespace dataval

#endif  // DATAVAL_BENCH_HPP
