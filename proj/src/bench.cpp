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

#include "dataval/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dataval/errors.hpp"
#include "dataval/parallel.hpp"
#include "dataval/valuation.hpp"

namespace dataval {

ApproximatorEvaluation evaluate_approximator(ValuationGame& game, const AlgorithmSpec& spec,
                                             std::size_t repetitions,
                                             const std::vector<double>& exact_phi,
                                             std::uint64_t master_seed,
                                             const EvaluationOptions& options) {
  if (repetitions < 2) throw ContractError("evaluate_approximator: AASTD needs at least 2 repetitions");
  const std::size_t n = game.n_players();
  if (exact_phi.size() != n) throw ContractError("evaluate_approximator: exact_phi has the wrong length");

  ApproximatorEvaluation eval;
  eval.spec = spec;
  eval.repetitions = repetitions;
  double tte_sum = 0.0, perm_sum = 0.0, abs_sum = 0.0, pct_sum = 0.0;
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    if (!options.reuse_cache) game.reset();
    const ApproxResult r = estimate_shapley(game, spec, derive_seed(master_seed, rep), options.workers);
    tte_sum += static_cast<double>(r.tte);
    perm_sum += static_cast<double>(r.permutations_used);
    double abs_err = 0.0, pct_err = 0.0;
    std::size_t pct_players = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double err = std::abs(r.phi[i] - exact_phi[i]);
      abs_err += err;
      if (std::abs(exact_phi[i]) > kPercentGuard) {
        pct_err += err / std::abs(exact_phi[i]);
        ++pct_players;
      }
    }
    abs_sum += abs_err / static_cast<double>(n);
    if (pct_players > 0) pct_sum += pct_err / static_cast<double>(pct_players);
    eval.estimates.push_back(r.phi);
  }
  const auto reps = static_cast<double>(repetitions);
  eval.aaae = abs_sum / reps;
  eval.aape = pct_sum / reps;
  eval.mean_tte = tte_sum / reps;
  eval.mean_permutations = perm_sum / reps;

  double std_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Shifted by the first estimate so identical repetitions give exactly 0.
    const double pivot = eval.estimates.front()[i];
    double mean = 0.0;
    for (const auto& e : eval.estimates) mean += e[i] - pivot;
    mean /= reps;
    double ss = 0.0;
    for (const auto& e : eval.estimates) ss += (e[i] - pivot - mean) * (e[i] - pivot - mean);
    std_sum += std::sqrt(ss / (reps - 1.0));
  }
  eval.aastd = n > 0 ? std_sum / static_cast<double>(n) : 0.0;
  return eval;
}

CooperationAnalysis cooperation_benefit(ValuationGame& game, const ZoneId& zone,
                                        const std::vector<double>& thresholds, double accuracy_floor) {
  const std::size_t n = game.n_players();
  if (n < 2) throw ContractError("cooperation_benefit: zone '" + zone + "' has fewer than 2 sources");
  CooperationAnalysis a;
  a.zone = zone;
  a.n_sources = n;
  a.v_all = game.value(Coalition::full(n));
  a.solo.resize(n);
  for (std::size_t i = 0; i < n; ++i) a.solo[i] = game.value(Coalition::of({i}, n));
  a.mean_solo = std::accumulate(a.solo.begin(), a.solo.end(), 0.0) / static_cast<double>(n);
  a.forecastable = a.v_all >= accuracy_floor;
  if (a.forecastable) a.benefit = a.v_all - a.mean_solo;
  for (double tau : thresholds) {
    const auto willing = static_cast<std::size_t>(std::count_if(
        a.solo.begin(), a.solo.end(), [&](double solo) { return a.v_all - solo >= tau; }));
    a.willing.emplace_back(tau, willing);
  }
  return a;
}

std::vector<CooperationAnalysis> cooperation_benefit(const std::vector<DemandPanel>& panels,
                                                     std::shared_ptr<const Forecaster> forecaster,
                                                     Metric metric,
                                                     const std::vector<double>& thresholds,
                                                     double accuracy_floor) {
  std::vector<CooperationAnalysis> out;
  for (const auto& panel : panels) {
    ForecastValueGame game(panel, forecaster, metric);
    out.push_back(cooperation_benefit(game, panel.zone, thresholds, accuracy_floor));
  }
  return out;
}

std::vector<std::size_t> sample_subset(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw ContractError("sample_subset: k exceeds n");
  std::vector<std::size_t> items(n);
  std::iota(items.begin(), items.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_below(rng, n - i);
    std::swap(items[i], items[j]);
  }
  items.resize(k);
  std::sort(items.begin(), items.end());
  return items;
}

std::vector<CurvePoint> accuracy_probability_curve(ValuationGame& game,
                                                   const std::vector<std::size_t>& k_values,
                                                   std::size_t samples_per_k, double target_fraction,
                                                   std::uint64_t seed, std::size_t workers) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw ContractError("accuracy_probability_curve: target fraction must lie in (0, 1]");
  }
  if (samples_per_k == 0) throw ContractError("accuracy_probability_curve: samples_per_k must be >= 1");
  const std::size_t n = game.n_players();
  for (std::size_t k : k_values) {
    if (k == 0 || k > n) {
      throw ContractError("accuracy_probability_curve: k = " + std::to_string(k) + " outside [1, " +
                          std::to_string(n) + "]");
    }
  }
  const double target = target_fraction * game.value(Coalition::full(n));
  std::vector<CurvePoint> curve;
  for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
    Rng rng(derive_seed(seed, ki));
    std::vector<Coalition> draws;
    draws.reserve(samples_per_k);
    for (std::size_t s = 0; s < samples_per_k; ++s) {
      draws.push_back(Coalition::of(sample_subset(n, k_values[ki], rng), n));
    }
    std::vector<char> hit(samples_per_k, 0);
    parallel_for(samples_per_k, workers, [&](std::size_t s) { hit[s] = game.value(draws[s]) >= target; });
    const auto hits = static_cast<double>(std::count(hit.begin(), hit.end(), 1));
    curve.push_back({k_values[ki], hits / static_cast<double>(samples_per_k), samples_per_k});
  }
  return curve;
}

PimsResult pims_select(ValuationGame& game, double accuracy_target, std::size_t batch_size,
                       std::size_t max_batches, std::uint64_t seed) {
  if (batch_size == 0) throw ContractError("pims_select: batch size must be >= 1");
  const std::size_t n = game.n_players();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  fisher_yates_shuffle(std::span<std::size_t>(order), rng);

  PimsResult result;
  Coalition selected(n);
  std::size_t next = 0;
  while (result.batches_used < max_batches && next < n) {
    const std::size_t end = std::min(n, next + batch_size);
    for (; next < end; ++next) selected.insert(order[next]);
    ++result.batches_used;
    result.value = game.value(selected);
    if (result.value >= accuracy_target) {
      result.success = true;
      break;
    }
  }
  result.selected = selected.members();
  return result;
}

double coefficient_of_determination(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw ContractError("coefficient_of_determination: bad lengths");
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  constexpr double kFlat = 1e-24;
  if (saa <= kFlat && sbb <= kFlat) return std::abs(ma - mb) <= 1e-12 ? 1.0 : 0.0;
  if (saa <= kFlat || sbb <= kFlat) return 0.0;
  return (sab * sab) / (saa * sbb);
}

namespace {

std::vector<std::size_t> top_k_indices(const std::vector<double>& v, std::size_t k) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] > v[y]; });
  idx.resize(std::min(k, idx.size()));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

double top_k_agreement(const std::vector<double>& a, const std::vector<double>& b, std::size_t k) {
  if (a.size() != b.size()) throw ContractError("top_k_agreement: length mismatch");
  k = std::min(k, a.size());
  if (k == 0) return 1.0;
  const auto ta = top_k_indices(a, k);
  const auto tb = top_k_indices(b, k);
  std::vector<std::size_t> common;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(k);
}

MetricComparison metric_cross_validation(const DemandPanel& panel,
                                         std::shared_ptr<const Forecaster> forecaster,
                                         const AlgorithmSpec& spec, const std::vector<Metric>& metrics,
                                         std::uint64_t seed, std::size_t top_k, std::size_t workers) {
  MetricComparison out;
  out.metrics = metrics;
  out.top_k = top_k;
  auto shared = std::make_shared<const DemandPanel>(panel);
  for (Metric m : metrics) {
    ForecastValueGame game(shared, forecaster, m);
    out.phi.push_back(estimate_shapley(game, spec, seed, workers).phi);
    out.shares.push_back(normalized_shares(out.phi.back()));
  }
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    for (std::size_t j = i + 1; j < metrics.size(); ++j) {
      out.pairs.push_back({metrics[i], metrics[j], coefficient_of_determination(out.shares[i], out.shares[j]),
                           top_k_agreement(out.shares[i], out.shares[j], top_k)});
    }
  }
  return out;
}

}  // namespace dataval
