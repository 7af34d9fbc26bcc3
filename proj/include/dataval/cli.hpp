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

#ifndef DATAVAL_CLI_HPP
#define DATAVAL_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace dataval {

/// Process exit codes.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kConfig = 2;
inline constexpr int kData = 3;
inline constexpr int kInfeasible = 4;
}  // namespace exit_code

/// Resolved settings for one command. Built from defaults, then a JSON
/// config file (or a previous run's manifest), then command-line flags.
struct RunConfig {
  std::string command;

  std::string input;
  std::string schema = "generic";
  std::string from;
  std::string to;
  std::string zone;
  std::vector<std::string> zones;
  std::string source_column;
  std::int64_t top_k = 15;
  std::int64_t bin_width = 3600;
  std::string control_start;

  std::string forecaster = "seasonal_profile";
  std::string metric = "cossim";
  std::vector<std::string> metrics{"cossim", "numsim", "rdtw"};

  std::vector<std::string> algos{"exact"};
  std::vector<std::int64_t> rounds{4};
  double tau = 0.95;
  double conv_threshold = 0.01;
  std::int64_t min_perms = 0;
  std::int64_t max_perms = 0;
  std::int64_t exact_limit = 20;
  std::int64_t reps = 50;
  std::optional<std::uint64_t> seed;

  std::string game = "panel";
  std::int64_t players = 16;
  std::uint64_t game_seed = 1;

  std::vector<double> thresholds{0.1, 0.2};
  double floor = 0.6;
  std::vector<std::int64_t> k_values;
  std::int64_t samples_per_k = 100;
  double target_fraction = 0.95;
  double target = 0.95;
  std::int64_t batch_size = 5;
  std::int64_t max_batches = 10;
  bool strict = false;
  std::int64_t rank_k = 4;

  /// Execution-only settings; not part of the manifest.
  std::size_t workers = 1;
  std::string out = "dataval_out";

  /// Result-affecting keys as a flat JSON object.
  nlohmann::ordered_json to_json() const;
  /// Applies the keys present in `j`; throws ConfigError on unknown keys or
  /// wrong types.
  void apply_json(const nlohmann::json& j);
};

/// Runs one command. Returns an exit code; errors are reported on `err` as
/// a single JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dataval

#endif  // DATAVAL_CLI_HPP
