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

#include "dataval/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dataval/errors.hpp"

namespace dataval {
namespace {

void require_same_length(std::span<const double> a, std::span<const double> b, const char* op) {
  if (a.size() != b.size()) {
    throw ContractError(std::string(op) + ": length mismatch (" + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ContractError(std::string(op) + ": empty input");
}

double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

Forecast SeasonalProfileForecaster::fit_predict(std::span<const double> observed,
                                                const TimeGrid& grid) const {
  if (observed.size() != grid.observation.size()) {
    throw ContractError("training series length does not match the observation window");
  }
  const std::size_t period = grid.bins_per_week();
  const std::size_t weeks = observed.size() / period;
  if (weeks < 2) {
    throw ConfigError("seasonal_profile needs at least 2 complete weeks of observation, got " +
                      std::to_string(observed.size()) + " bins");
  }
  const auto window = observed.subspan(observed.size() - weeks * period);

  std::vector<double> profile(period, 0.0);
  for (std::size_t w = 0; w < weeks; ++w) {
    for (std::size_t p = 0; p < period; ++p) profile[p] += window[w * period + p];
  }
  for (double& x : profile) x /= static_cast<double>(weeks);

  const double overall = mean(window);
  if (!(overall > 0.0)) throw UntrainableCoalition();
  const double last_week = mean(window.subspan((weeks - 1) * period));
  const double trend = last_week / overall;

  // The window ends at the observation boundary, so control bin k has the
  // same weekly phase as window index k mod period.
  Forecast out;
  out.values.resize(grid.control.size());
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] = std::max(0.0, profile[k % period] * trend);
  }
  return out;
}

std::shared_ptr<const Forecaster> make_forecaster(std::string_view name) {
  if (name == "seasonal_profile") return std::make_shared<SeasonalProfileForecaster>();
  throw ConfigError("unknown forecaster '" + std::string(name) + "' (expected seasonal_profile)");
}

Metric parse_metric(std::string_view name) {
  if (name == "cossim") return Metric::cossim;
  if (name == "numsim") return Metric::numsim;
  if (name == "rdtw") return Metric::rdtw;
  throw ConfigError("unknown metric '" + std::string(name) + "' (expected cossim, numsim, rdtw)");
}

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::cossim: return "cossim";
    case Metric::numsim: return "numsim";
    case Metric::rdtw: return "rdtw";
  }
  return "cossim";
}

double cosine_similarity(std::span<const double> truth, std::span<const double> pred) {
  require_same_length(truth, pred, "cosine_similarity");
  double dot = 0.0, nt = 0.0, np = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    dot += truth[i] * pred[i];
    nt += truth[i] * truth[i];
    np += pred[i] * pred[i];
  }
  if (nt == 0.0 || np == 0.0) return 0.0;
  return dot / (std::sqrt(nt) * std::sqrt(np));
}

std::vector<double> mean_normalize(std::span<const double> series) {
  std::vector<double> out(series.begin(), series.end());
  const double m = mean(series);
  if (m == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  for (double& x : out) x /= m;
  return out;
}

double numerical_similarity(std::span<const double> truth, std::span<const double> pred) {
  require_same_length(truth, pred, "numerical_similarity");
  const auto a = mean_normalize(truth);
  const auto b = mean_normalize(pred);
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double den = a[t] + b[t];
    if (den != 0.0) sum += std::abs(a[t] - b[t]) / den;
  }
  return 1.0 - sum / static_cast<double>(a.size());
}

double dtw_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ContractError("dtw_distance: empty input");
  const std::size_t m = b.size();
  std::vector<double> prev(m), cur(m);
  for (std::size_t j = 0; j < m; ++j) {
    prev[j] = std::abs(a[0] - b[j]) + (j > 0 ? prev[j - 1] : 0.0);
  }
  for (std::size_t i = 1; i < a.size(); ++i) {
    cur[0] = std::abs(a[i] - b[0]) + prev[0];
    for (std::size_t j = 1; j < m; ++j) {
      cur[j] = std::abs(a[i] - b[j]) + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

double relative_dtw(std::span<const double> truth, std::span<const double> pred) {
  require_same_length(truth, pred, "relative_dtw");
  const auto a = mean_normalize(truth);
  const auto b = mean_normalize(pred);
  const std::vector<double> zeros(a.size(), 0.0);
  const double den = dtw_distance(a, zeros);
  if (den == 0.0) throw ContractError("relative_dtw: truth is all zero");
  return 1.0 - dtw_distance(a, b) / den;
}

double similarity(Metric metric, std::span<const double> truth, std::span<const double> pred) {
  switch (metric) {
    case Metric::cossim: return cosine_similarity(truth, pred);
    case Metric::numsim: return numerical_similarity(truth, pred);
    case Metric::rdtw: return relative_dtw(truth, pred);
  }
  return 0.0;
}

}  // namespace dataval
