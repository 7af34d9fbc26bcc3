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

#ifndef DATAVAL_FORECAST_HPP
#define DATAVAL_FORECAST_HPP

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dataval/core.hpp"

namespace dataval {

struct Forecast {
  std::vector<double> values;
};

/// Trains on the observation window of a series and predicts the control
/// window.
class Forecaster {
 public:
  virtual ~Forecaster() = default;

  /// `observed` holds the series over grid.observation. The result has
  /// grid.control.size() entries. Throws UntrainableCoalition when the
  /// training data carries no signal.
  virtual Forecast fit_predict(std::span<const double> observed, const TimeGrid& grid) const = 0;
  virtual std::string name() const = 0;
};

/// Hour-of-week profile predictor.
///
/// Uses the last W >= 2 complete weeks of the observation window. Each
/// control bin is predicted as the mean of the training bins sharing its
/// phase within the week, times the level ratio
/// mean(last week) / mean(all W weeks). Negative predictions clamp to 0.
/// The prediction is homogeneous: scaling the input by c > 0 scales the
/// output by c.
class SeasonalProfileForecaster final : public Forecaster {
 public:
  Forecast fit_predict(std::span<const double> observed, const TimeGrid& grid) const override;
  std::string name() const override { return "seasonal_profile"; }
};

/// Throws ConfigError for unknown names. Known: seasonal_profile.
std::shared_ptr<const Forecaster> make_forecaster(std::string_view name);

enum class Metric { cossim, numsim, rdtw };

/// Throws ConfigError for names other than cossim, numsim, rdtw.
Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric metric);

/// Cosine of the angle between truth and pred; 0 if either has zero norm.
double cosine_similarity(std::span<const double> truth, std::span<const double> pred);

/// Each series divided by its own mean; an all-zero series stays zero.
std::vector<double> mean_normalize(std::span<const double> series);

/// 1 - mean over bins of |a - b| / (a + b) on mean-normalized inputs. Bins
/// where both normalized values are 0 contribute 0.
double numerical_similarity(std::span<const double> truth, std::span<const double> pred);

/// Full-window DTW with local cost |a_i - b_j| and a path from (0, 0) to
/// (n-1, m-1).
double dtw_distance(std::span<const double> a, std::span<const double> b);

/// 1 - DTW(norm truth, norm pred) / DTW(norm truth, 0). Throws ContractError
/// for an all-zero truth. Can be negative when the prediction is worse than
/// predicting nothing.
double relative_dtw(std::span<const double> truth, std::span<const double> pred);

double similarity(Metric metric, std::span<const double> truth, std::span<const double> pred);

}  // namespace dataval

#endif  // DATAVAL_FORECAST_HPP
