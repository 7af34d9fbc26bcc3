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

#include "dataval/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dataval/errors.hpp"
#include "dataval/parallel.hpp"
#include "dataval/valuation.hpp"

namespace dataval {
namespace {

Permutation identity(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

struct Walk {
  std::vector<double> marginal;
  std::uint64_t skips = 0;
};

/// Marginal contribution of every player along one permutation.
Walk walk_permutation(ValuationGame& game, const Permutation& perm, bool truncate, double threshold) {
  const std::size_t n = game.n_players();
  Walk w;
  w.marginal.assign(n, 0.0);
  Coalition prefix(n);
  double prev = 0.0;
  for (std::size_t j = 0; j < perm.size(); ++j) {
    const std::size_t player = perm[j];
    if (truncate && prev > threshold) {
      w.skips += perm.size() - j;
      break;
    }
    prefix.insert(player);
    const double cur = game.value(prefix);
    w.marginal[player] = cur - prev;
    prev = cur;
  }
  return w;
}

void accumulate_running_mean(std::vector<double>& phi, const std::vector<double>& marginal,
                             std::size_t t) {
  const double keep = static_cast<double>(t - 1) / static_cast<double>(t);
  const double inv = 1.0 / static_cast<double>(t);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = keep * phi[i] + inv * marginal[i];
}

void check_permutation(const Permutation& perm, std::size_t n) {
  if (perm.size() != n) throw ContractError("plan permutation length differs from player count");
  std::vector<char> seen(n, 0);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) throw ContractError("plan entry is not a permutation");
    seen[p] = 1;
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> build_latin_square(std::size_t n) {
  if (n == 0) throw ContractError("build_latin_square: n must be >= 1");
  std::vector<std::vector<std::size_t>> square(n, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) square[i][j] = (i + j) % n;
  }
  return square;
}

SamplePlan ss_plan(std::size_t n, std::size_t rounds, std::uint64_t seed) {
  if (n == 0 || rounds == 0) throw ContractError("ss_plan: n and rounds must be >= 1");
  SamplePlan plan{n, {}, PlanKind::ss, rounds, seed};
  plan.permutations.reserve(n * rounds);
  const auto square = build_latin_square(n);
  Rng rng(seed);
  Permutation q = identity(n);
  for (std::size_t round = 0; round < rounds; ++round) {
    fisher_yates_shuffle(std::span<std::size_t>(q), rng);
    for (std::size_t i = 0; i < n; ++i) {
      Permutation perm(n);
      for (std::size_t j = 0; j < n; ++j) perm[j] = q[square[i][j]];
      plan.permutations.push_back(std::move(perm));
    }
  }
  return plan;
}

SamplePlan rs_plan(std::size_t n, std::size_t rounds, std::uint64_t seed) {
  if (n == 0 || rounds == 0) throw ContractError("rs_plan: n and rounds must be >= 1");
  SamplePlan plan{n, {}, PlanKind::rs, rounds, seed};
  plan.permutations.reserve(n * rounds);
  Rng rng(seed);
  for (std::size_t k = 0; k < n * rounds; ++k) {
    Permutation perm = identity(n);
    fisher_yates_shuffle(std::span<std::size_t>(perm), rng);
    plan.permutations.push_back(std::move(perm));
  }
  return plan;
}

ApproxResult run_plan(ValuationGame& game, const SamplePlan& plan, const TruncationPolicy& policy,
                      std::size_t workers) {
  const std::size_t n = game.n_players();
  if (plan.n_players != n) throw ContractError("plan player count differs from the game");
  for (const auto& perm : plan.permutations) check_permutation(perm, n);

  const std::uint64_t tte_before = game.tte();
  const bool truncate = policy.active();
  double threshold = 0.0;
  if (truncate) {
    const double v_full = game.value(Coalition::full(n));
    threshold = v_full - policy.epsilon(v_full);
  }

  ApproxResult result;
  result.phi.assign(n, 0.0);
  const std::size_t total = plan.permutations.size();
  // Chunking bounds memory for large player counts; reduction order within
  // and across chunks is plan order.
  const std::size_t chunk = std::max<std::size_t>(64, 8 * std::max<std::size_t>(workers, 1));
  std::vector<Walk> walks;
  for (std::size_t base = 0; base < total; base += chunk) {
    const std::size_t count = std::min(chunk, total - base);
    walks.assign(count, Walk{});
    parallel_for(count, workers, [&](std::size_t k) {
      walks[k] = walk_permutation(game, plan.permutations[base + k], truncate, threshold);
    });
    for (std::size_t k = 0; k < count; ++k) {
      accumulate_running_mean(result.phi, walks[k].marginal, base + k + 1);
      result.truncation_skips += walks[k].skips;
    }
  }
  result.permutations_used = total;
  result.tte = game.tte() - tte_before;
  return result;
}

ApproxResult mc_shapley(ValuationGame& game, const McOptions& options) {
  if (!(options.convergence_threshold > 0.0 && options.convergence_threshold < 1.0)) {
    throw ContractError("mc_shapley: convergence threshold must lie in (0, 1)");
  }
  const std::size_t n = game.n_players();
  if (n == 0) return {};
  const std::size_t min_perms = std::max<std::size_t>(2, options.min_permutations ? options.min_permutations : 2 * n);
  const std::size_t max_perms =
      std::max(min_perms, options.max_permutations ? options.max_permutations : 100 * n);

  const std::uint64_t tte_before = game.tte();
  const bool truncate = options.truncation.active();
  double threshold = 0.0;
  if (truncate) {
    const double v_full = game.value(Coalition::full(n));
    threshold = v_full - options.truncation.epsilon(v_full);
  }

  ApproxResult result;
  result.phi.assign(n, 0.0);
  std::vector<double> previous(n, 0.0);
  Rng rng(options.seed);
  for (std::size_t t = 1; t <= max_perms; ++t) {
    Permutation perm = identity(n);
    fisher_yates_shuffle(std::span<std::size_t>(perm), rng);
    const Walk w = walk_permutation(game, perm, truncate, threshold);
    previous = result.phi;
    accumulate_running_mean(result.phi, w.marginal, t);
    result.truncation_skips += w.skips;
    result.permutations_used = t;
    if (t < min_perms) continue;
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double change = std::abs(result.phi[i] - previous[i]) / (std::abs(result.phi[i]) + kRelativeChangeGuard);
      max_change = std::max(max_change, change);
    }
    if (max_change < options.convergence_threshold) break;
  }
  result.tte = game.tte() - tte_before;
  return result;
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "exact") return Algorithm::exact;
  if (name == "mc") return Algorithm::mc;
  if (name == "tmc") return Algorithm::tmc;
  if (name == "rs") return Algorithm::rs;
  if (name == "trs") return Algorithm::trs;
  if (name == "ss") return Algorithm::ss;
  if (name == "tss") return Algorithm::tss;
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (expected exact, mc, tmc, rs, trs, ss, tss)");
}

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::exact: return "exact";
    case Algorithm::mc: return "mc";
    case Algorithm::tmc: return "tmc";
    case Algorithm::rs: return "rs";
    case Algorithm::trs: return "trs";
    case Algorithm::ss: return "ss";
    case Algorithm::tss: return "tss";
  }
  return "exact";
}

bool is_truncated(Algorithm a) { return a == Algorithm::tmc || a == Algorithm::trs || a == Algorithm::tss; }

bool is_stochastic(Algorithm a) { return a != Algorithm::exact; }

std::string AlgorithmSpec::label() const {
  std::string out(algorithm_name(algorithm));
  if (algorithm == Algorithm::exact) return out;
  out += '(';
  if (algorithm == Algorithm::mc || algorithm == Algorithm::tmc) {
    out += "conv=" + format_real(convergence_threshold);
  } else {
    out += "r=" + std::to_string(rounds);
  }
  if (is_truncated(algorithm)) out += ",tau=" + format_real(tau);
  out += ')';
  return out;
}

ApproxResult estimate_shapley(ValuationGame& game, const AlgorithmSpec& spec, std::uint64_t seed,
                              std::size_t workers) {
  const TruncationPolicy policy = is_truncated(spec.algorithm) ? TruncationPolicy::at(spec.tau)
                                                               : TruncationPolicy::none();
  switch (spec.algorithm) {
    case Algorithm::exact: {
      const std::uint64_t before = game.tte();
      ApproxResult r;
      ExactOptions options;
      options.limit = spec.exact_limit;
      options.workers = workers;
      r.phi = exact_shapley(game, options);
      r.tte = game.tte() - before;
      return r;
    }
    case Algorithm::mc:
    case Algorithm::tmc: {
      McOptions options;
      options.convergence_threshold = spec.convergence_threshold;
      options.truncation = policy;
      options.seed = seed;
      options.min_permutations = spec.min_permutations;
      options.max_permutations = spec.max_permutations;
      return mc_shapley(game, options);
    }
    case Algorithm::rs:
    case Algorithm::trs:
      return run_plan(game, rs_plan(game.n_players(), spec.rounds, seed), policy, workers);
    case Algorithm::ss:
    case Algorithm::tss:
      return run_plan(game, ss_plan(game.n_players(), spec.rounds, seed), policy, workers);
  }
  throw ContractError("unhandled algorithm");
}

}  // namespace dataval
