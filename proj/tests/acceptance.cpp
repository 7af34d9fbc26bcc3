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

// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dataval/approx.hpp"
#include "dataval/bench.hpp"
#include "dataval/cli.hpp"
#include "dataval/forecast.hpp"
#include "dataval/synthetic.hpp"
#include "dataval/valuation.hpp"
#include "oracles.hpp"

namespace {

using namespace dataval;
using dataval::testing::brute_force_dtw;
using dataval::testing::permutation_shapley;
using dataval::testing::random_game_table;
using dataval::testing::range_of;

namespace fs = std::filesystem;

int g_failures = 0;

void report(bool ok, const char* name, const std::string& detail, double seconds) {
  std::printf("%s  %-22s %s (%.1fs)\n", ok ? "PASS" : "FAIL", name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

struct Outcome {
  bool ok;
  std::string detail;
};

void criterion(const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(o.ok, name, o.detail, dt);
}

// Random game with a planted dummy (player 0) and a planted symmetric pair
// (players 1 and 2).
std::vector<double> planted_table(std::size_t n, std::uint64_t seed) {
  auto table = random_game_table(n, seed);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t m = 0; m < total; ++m) {
    if (m & 1) table[m] = table[m & ~std::uint64_t{1}];
  }
  for (std::uint64_t m = 0; m < total; ++m) {
    if ((m & 2) && !(m & 4)) table[m] = table[(m & ~std::uint64_t{2}) | 4];
  }
  table[0] = 0.0;
  return table;
}

Outcome shapley_axioms() {
  double worst_eff = 0, worst_sym = 0, worst_dummy = 0, worst_oracle = 0;
  for (std::uint64_t g = 0; g < 200; ++g) {
    const std::size_t n = 3 + g % 8;
    const auto table = planted_table(n, 5000 + g);
    TableGame game(n, table);
    const auto phi = exact_shapley(game);
    worst_eff = std::max(worst_eff, std::abs(std::accumulate(phi.begin(), phi.end(), 0.0) - table.back()));
    worst_sym = std::max(worst_sym, std::abs(phi[1] - phi[2]));
    worst_dummy = std::max(worst_dummy, std::abs(phi[0]));
    if (n <= 6) {
      const auto oracle = permutation_shapley(n, [&](std::uint64_t m) { return table[m]; });
      for (std::size_t i = 0; i < n; ++i) worst_oracle = std::max(worst_oracle, std::abs(phi[i] - oracle[i]));
    }
  }
  // "Exactly" is read as agreement to rounding: 1e-12 on values of order 1.
  const bool ok = worst_eff <= 1e-9 && worst_sym <= 1e-9 && worst_dummy <= 1e-9 && worst_oracle <= 1e-12;
  return {ok, fmt("200 games; max err efficiency %.1e symmetry %.1e dummy %.1e oracle %.1e", worst_eff,
                  worst_sym, worst_dummy, worst_oracle)};
}

Outcome estimator_correctness() {
  double worst_ratio = 0.0;
  bool bit_exact = true;
  for (std::uint64_t g = 0; g < 20; ++g) {
    const auto table = random_game_table(8, 700 + g, true);
    std::vector<double> nonempty(table.begin() + 1, table.end());
    nonempty.push_back(0.0);
    const double range = range_of(nonempty);
    const auto exact = permutation_shapley(8, [&](std::uint64_t m) { return table[m]; });
    for (PlanKind kind : {PlanKind::rs, PlanKind::ss}) {
      TableGame game(8, table);
      const auto plan = kind == PlanKind::rs ? rs_plan(8, 200, g) : ss_plan(8, 200, g);
      const auto phi = run_plan(game, plan).phi;
      double mae = 0.0;
      for (std::size_t i = 0; i < 8; ++i) mae += std::abs(phi[i] - exact[i]) / 8;
      worst_ratio = std::max(worst_ratio, mae / range);
      if (kind == PlanKind::ss) {
        TableGame again(8, table);
        bit_exact = bit_exact && run_plan(again, plan, TruncationPolicy::at(1.0)).phi == phi;
      }
    }
  }
  return {worst_ratio <= 0.02 && bit_exact,
          fmt("worst mean|err|/range(v) = %.4f (limit 0.02); ss tau=1 bit-exact: ", worst_ratio) +
              (bit_exact ? "yes" : "no")};
}

ApproximatorEvaluation evaluate(SaturatingGame& game, Algorithm algo, std::size_t rounds, std::uint64_t seed,
                                double tau = 0.95) {
  AlgorithmSpec spec;
  spec.algorithm = algo;
  spec.rounds = rounds;
  spec.tau = tau;
  return evaluate_approximator(game, spec, 50, game.closed_form_shapley(), seed);
}

Outcome ss_dominance() {
  int wins = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SaturatingGame game(default_saturating_params(), seed);
    const auto rs = evaluate(game, Algorithm::rs, 4, seed);
    const auto ss = evaluate(game, Algorithm::ss, 4, seed);
    const bool win = ss.aape <= rs.aape && ss.aastd <= rs.aastd;
    wins += win ? 1 : 0;
    per_seed += win ? '+' : '-';
  }
  return {wins >= 8, fmt("ss <= rs on AAPE and AASTD for %.0f/10 seeds (need 8) ", wins) + per_seed};
}

Outcome accuracy_vs_budget() {
  SaturatingGame game(default_saturating_params(), 1);
  const auto r1 = evaluate(game, Algorithm::ss, 1, 42);
  const auto r16 = evaluate(game, Algorithm::ss, 16, 42);
  return {r1.aape <= 0.15 && r16.aape <= 0.06,
          fmt("AAPE(ss,r=1) = %.4f (<= 0.15), AAPE(ss,r=16) = %.4f (<= 0.06)", r1.aape, r16.aape)};
}

Outcome truncation_tradeoff() {
  SaturatingGame game(early_saturating_params(), 1);
  const std::size_t r = 4;
  const auto ss = evaluate(game, Algorithm::ss, r, 42);
  const auto tss = evaluate(game, Algorithm::tss, r, 42, 0.95);
  const double speedup = ss.mean_tte / tss.mean_tte;
  return {speedup >= 4.0 && tss.aape <= 3.0 * ss.aape,
          fmt("r=%.0f tte %.1f -> %.1f (x%.2f, need >= 4)", r, ss.mean_tte, tss.mean_tte, speedup) +
              fmt(", AAPE %.4f -> %.4f (ratio %.2f, need <= 3)", ss.aape, tss.aape, tss.aape / ss.aape)};
}

Outcome metric_identities() {
  using V = std::vector<double>;
  struct Case {
    const char* what;
    double got;
    double want;
  };
  const std::vector<Case> cases{
      {"cossim identical", cosine_similarity(V{1, 2, 3}, V{1, 2, 3}), 1.0},
      {"cossim orthogonal", cosine_similarity(V{1, 0}, V{0, 1}), 0.0},
      {"cossim 45deg", cosine_similarity(V{1, 1}, V{1, 0}), 1.0 / std::sqrt(2.0)},
      {"numsim identical", numerical_similarity(V{1, 4, 2}, V{1, 4, 2}), 1.0},
      {"numsim zero pred", numerical_similarity(V{1, 1}, V{0, 0}), 0.0},
      {"numsim swapped", numerical_similarity(V{2, 0}, V{0, 2}), 0.0},
      {"dtw identical", dtw_distance(V{1, 2, 3}, V{1, 2, 3}), 0.0},
      {"dtw offset", dtw_distance(V{0, 0}, V{1, 1}), 2.0},
      {"dtw warp", dtw_distance(V{1, 2}, V{1, 1, 2}), 0.0},
      {"rdtw identical", relative_dtw(V{3, 1, 2}, V{3, 1, 2}), 1.0},
      {"rdtw zero pred", relative_dtw(V{3, 1, 2}, V{0, 0, 0}), 0.0},
      // Brute force: every anchored path costs 4, the zero baseline costs 2.
      {"rdtw swapped", relative_dtw(V{0, 2}, V{2, 0}), 1.0 - brute_force_dtw({0, 2}, {2, 0}) / brute_force_dtw({0, 2}, {0, 0})},
  };
  std::string bad;
  for (const auto& c : cases) {
    if (std::abs(c.got - c.want) > 1e-15) bad += std::string(" ") + c.what;
  }
  std::mt19937_64 rng(17);
  std::vector<V> pool;
  for (int s = 0; s < 100; ++s) {
    V v(1 + rng() % 6);
    for (double& x : v) x = static_cast<double>(static_cast<int>(rng() % 11) - 3);
    pool.push_back(v);
  }
  std::size_t pairs = 0, mismatches = 0;
  for (const auto& a : pool) {
    for (const auto& b : pool) {
      ++pairs;
      if (dtw_distance(a, b) != brute_force_dtw(a, b)) ++mismatches;
    }
  }
  const bool ok = bad.empty() && mismatches == 0;
  return {ok, fmt("%.0f example cases, DTW vs brute force %.0f/%.0f pairs agree", static_cast<double>(cases.size()),
                  static_cast<double>(pairs - mismatches), static_cast<double>(pairs)) +
                  (bad.empty() ? "" : "; failing:" + bad)};
}

Outcome forecaster_sanity() {
  double worst = 1.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PanelSpec spec;
    spec.observation_weeks = 4;
    spec.control_weeks = 2;
    spec.noise_sigma = 0.1;
    spec.seed = seed;
    const auto shape = weekly_demand_shape(168, 1000 + seed);
    const auto panel = scaled_copies_panel(shape, {40, 25, 15, 10, 5}, spec);
    ForecastValueGame game(panel, make_forecaster("seasonal_profile"), Metric::cossim);
    worst = std::min(worst, game.value(Coalition::full(panel.n_sources())));
  }
  return {worst >= 0.95, fmt("min CosSim v(N) over 20 seeds = %.4f (>= 0.95)", worst)};
}

std::size_t rank_of(const std::vector<double>& v, std::size_t i) {
  std::size_t above = 0;
  for (double x : v) above += x > v[i] ? 1 : 0;
  return above + 1;
}

Outcome heuristic_divergence() {
  auto pair = complementary_pair_game();
  const auto phi = exact_shapley(*pair);
  const auto loo = leave_one_out(*pair);
  const bool pair_ok = std::abs(phi[0] - 0.5) <= 1e-9 && std::abs(phi[1] - 0.5) <= 1e-9 &&
                       std::abs(loo[0] - 1.0) <= 1e-12 && std::abs(loo[1] - 1.0) <= 1e-12;

  const auto panel = night_coverage_panel(PanelSpec{});
  ForecastValueGame game(panel, make_forecaster("seasonal_profile"), Metric::cossim);
  const auto night_phi = exact_shapley(game);
  const auto volume = volume_shares(panel);
  const std::size_t night = panel.n_sources() - 1;
  const std::size_t shapley_rank = rank_of(night_phi, night), volume_rank = rank_of(volume, night);
  const bool night_ok = shapley_rank < volume_rank;
  return {pair_ok && night_ok,
          fmt("pair phi [%.3f, %.3f] loo [%.0f, %.0f]; ", phi[0], phi[1], loo[0], loo[1]) +
              fmt("night source Shapley rank %.0f vs volume rank %.0f", static_cast<double>(shapley_rank),
                  static_cast<double>(volume_rank))};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const fs::path& data) {
  const fs::path root = fs::temp_directory_path() / "dataval_acceptance";
  fs::remove_all(root);
  const std::string three = (data / "three_sources.csv").string(), five = (data / "five_zones.csv").string();
  const std::vector<std::vector<std::string>> commands{
      {"value", "--input", three, "--algo", "tss", "--rounds", "4", "--seed", "3"},
      {"value", "--input", three, "--algo", "mc", "--seed", "3"},
      {"bench-approx", "--game", "saturating", "--algo", "mc,tmc,rs,trs,ss,tss", "--reps", "5", "--seed", "9"},
      {"retail-curve", "--game", "saturating", "--samples-per-k", "50", "--seed", "4"},
      {"pims", "--game", "saturating", "--seed", "4"},
      {"metric-compare", "--input", three, "--algo", "ss", "--rounds", "8", "--seed", "6"},
      {"coop", "--input", five},
  };
  std::size_t files = 0, identical = 0;
  std::string bad;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    const std::string first = (root / ("a" + std::to_string(c))).string();
    const std::string second = (root / ("b" + std::to_string(c))).string();
    auto args = commands[c];
    args.insert(args.end(), {"--out", first, "--workers", "1"});
    std::ostringstream out, err;
    if (run_cli(args, out, err) != 0) return {false, commands[c][0] + " failed: " + err.str()};
    if (run_cli({commands[c][0], "--config", first + "/manifest.json", "--out", second, "--workers", "4"}, out,
                err) != 0) {
      return {false, commands[c][0] + " rerun failed: " + err.str()};
    }
    for (const auto& entry : fs::directory_iterator(first)) {
      ++files;
      if (slurp(entry.path()) == slurp(fs::path(second) / entry.path().filename())) {
        ++identical;
      } else {
        bad += " " + commands[c][0] + "/" + entry.path().filename().string();
      }
    }
  }
  fs::remove_all(root);
  return {identical == files, fmt("%.0f commands, %.0f/%.0f files byte-identical after manifest rerun with 4 workers",
                                  static_cast<double>(commands.size()), static_cast<double>(identical),
                                  static_cast<double>(files)) + bad};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path data = argc > 1 ? fs::path(argv[1]) : fs::path(DATAVAL_TEST_DATA_DIR);
  criterion("shapley-axioms", shapley_axioms);
  criterion("estimator-correctness", estimator_correctness);
  criterion("ss-dominance", ss_dominance);
  criterion("accuracy-vs-budget", accuracy_vs_budget);
  criterion("truncation-tradeoff", truncation_tradeoff);
  criterion("metric-identities", metric_identities);
  criterion("forecaster-sanity", forecaster_sanity);
  criterion("heuristic-divergence", heuristic_divergence);
  criterion("determinism", [&] { return determinism(data); });
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
