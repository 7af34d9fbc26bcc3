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

#ifndef DATAVAL_APPROX_HPP
#define DATAVAL_APPROX_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dataval/core.hpp"
#include "dataval/rng.hpp"

namespace dataval {

using Permutation = std::vector<std::size_t>;

enum class PlanKind { mc_stream, rs, ss };

struct SamplePlan {
  std::size_t n_players = 0;
  std::vector<Permutation> permutations;
  PlanKind provenance = PlanKind::rs;
  std::size_t rounds = 0;
  std::uint64_t seed = 0;
};

/// Assign zero marginal to the rest of a permutation once a prefix scores
/// above tau * v(N). tau >= 1 never truncates.
struct TruncationPolicy {
  bool enabled = false;
  double tau = 1.0;

  static TruncationPolicy none() { return {}; }
  static TruncationPolicy at(double tau) { return {true, tau}; }

  bool active() const { return enabled && tau < 1.0; }
  /// epsilon = (1 - tau) * v(N).
  double epsilon(double v_full) const { return (1.0 - tau) * v_full; }
};

struct ApproxResult {
  std::vector<double> phi;
  std::uint64_t tte = 0;
  std::size_t permutations_used = 0;
  std::uint64_t truncation_skips = 0;
};

/// Cyclic Latin square: square[i][j] = (i + j) mod n. Throws ContractError
/// for n == 0.
std::vector<std::vector<std::size_t>> build_latin_square(std::size_t n);

/// Structured sampling plan: r rounds, each shuffling Q and emitting the n
/// permutations perm_i[j] = Q[square[i][j]]. Every player sits at every
/// position exactly r times.
SamplePlan ss_plan(std::size_t n, std::size_t rounds, std::uint64_t seed);

/// r * n independent uniform permutations.
SamplePlan rs_plan(std::size_t n, std::size_t rounds, std::uint64_t seed);

/// Walks each permutation left to right over prefix coalitions and averages
/// the marginals per player as a running mean in plan order. Permutations
/// may run on `workers` threads; the reduction is sequential, so phi is
/// bit-identical for any worker count. tte is the number of new cache
/// entries the run created, including the up-front v(N) when truncating.
ApproxResult run_plan(ValuationGame& game, const SamplePlan& plan,
                      const TruncationPolicy& policy = {}, std::size_t workers = 1);

struct McOptions {
  double convergence_threshold = 0.01;
  TruncationPolicy truncation;
  std::uint64_t seed = 0;
  /// 0 means 2 * n.
  std::size_t min_permutations = 0;
  /// 0 means 100 * n.
  std::size_t max_permutations = 0;
};

inline constexpr double kRelativeChangeGuard = 1e-6;

/// Streams uniform permutations until max_i |dphi_i| / (|phi_i| + 1e-6)
/// drops below the threshold (checked from min_permutations on) or
/// max_permutations is reached.
ApproxResult mc_shapley(ValuationGame& game, const McOptions& options);

enum class Algorithm { exact, mc, tmc, rs, trs, ss, tss };

Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm algorithm);
bool is_truncated(Algorithm algorithm);
bool is_stochastic(Algorithm algorithm);

struct AlgorithmSpec {
  Algorithm algorithm = Algorithm::exact;
  std::size_t rounds = 4;
  double tau = 0.95;
  double convergence_threshold = 0.01;
  std::size_t min_permutations = 0;
  std::size_t max_permutations = 0;
  std::size_t exact_limit = 20;

  /// e.g. "tss(r=8,tau=0.95)".
  std::string label() const;
};

/// Dispatches to exact_shapley, mc_shapley or run_plan over an rs/ss plan.
ApproxResult estimate_shapley(ValuationGame& game, const AlgorithmSpec& spec, std::uint64_t seed,
                              std::size_t workers = 1);

}  // namespace dataval

#endif  // DATAVAL_APPROX_HPP
