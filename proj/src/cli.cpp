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

#include "dataval/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"

#include "dataval/approx.hpp"
#include "dataval/bench.hpp"
#include "dataval/errors.hpp"
#include "dataval/forecast.hpp"
#include "dataval/ingest.hpp"
#include "dataval/synthetic.hpp"
#include "dataval/timeutil.hpp"
#include "dataval/valuation.hpp"

namespace dataval {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

enum class KeyType { text, integer, unsigned_integer, real, boolean, text_list, integer_list, real_list };

struct KeySpec {
  const char* key;
  const char* flag;
  KeyType type;
  const char* help;
};

// Shared by flag parsing and config files; keys double as JSON names.
constexpr KeySpec kKeys[] = {
    {"input", "--input", KeyType::text, "Trip CSV file"},
    {"schema", "--schema", KeyType::text, "CSV schema: generic, chicago, nyc"},
    {"from", "--from", KeyType::text, "Window start (ISO 8601, inclusive)"},
    {"to", "--to", KeyType::text, "Window end (ISO 8601, exclusive)"},
    {"zone", "--zone", KeyType::text, "Zone filter; empty for city-wide"},
    {"zones", "--zones", KeyType::text_list, "Zones for coop (comma separated; default all)"},
    {"source_column", "--source-column", KeyType::text, "Source column override (e.g. 'Taxi ID')"},
    {"top_k", "--top-k", KeyType::integer, "Individual sources kept; the rest form TAIL (0 keeps all)"},
    {"bin_width", "--bin-width", KeyType::integer, "Bin width in seconds"},
    {"control_start", "--control-start", KeyType::text, "First instant of the control window"},
    {"forecaster", "--forecaster", KeyType::text, "Forecaster: seasonal_profile"},
    {"metric", "--metric", KeyType::text, "Metric: cossim, numsim, rdtw"},
    {"metrics", "--metrics", KeyType::text_list, "Metrics compared by metric-compare"},
    {"algo", "--algo", KeyType::text_list, "Algorithm(s): exact, mc, tmc, rs, trs, ss, tss"},
    {"rounds", "--rounds", KeyType::integer_list, "Rounds r for rs/ss (list for bench-approx)"},
    {"tau", "--tau", KeyType::real, "Truncation fraction of v(N)"},
    {"conv_threshold", "--conv-threshold", KeyType::real, "MC convergence threshold"},
    {"min_perms", "--min-perms", KeyType::integer, "MC minimum permutations (0: 2n)"},
    {"max_perms", "--max-perms", KeyType::integer, "MC maximum permutations (0: 100n)"},
    {"exact_limit", "--exact-limit", KeyType::integer, "Largest player count for exact Shapley"},
    {"reps", "--reps", KeyType::integer, "Repetitions per approximator"},
    {"seed", "--seed", KeyType::unsigned_integer, "Master seed"},
    {"game", "--game", KeyType::text,
     "Game: panel, saturating, early-saturating, additive, complementary"},
    {"players", "--players", KeyType::integer, "Players in a synthetic game"},
    {"game_seed", "--game-seed", KeyType::unsigned_integer, "Seed that draws a synthetic game"},
    {"thresholds", "--thresholds", KeyType::real_list, "Cooperation thresholds"},
    {"floor", "--floor", KeyType::real, "Accuracy floor for forecastable zones"},
    {"k_values", "--k-values", KeyType::integer_list, "Coalition sizes for retail-curve (default 1..n)"},
    {"samples_per_k", "--samples-per-k", KeyType::integer, "Subsets drawn per k"},
    {"target_fraction", "--target-fraction", KeyType::real, "Fraction of v(N) to reach"},
    {"target", "--target", KeyType::real, "Absolute accuracy target for pims"},
    {"batch_size", "--batch-size", KeyType::integer, "Sources per pims batch"},
    {"max_batches", "--max-batches", KeyType::integer, "Pims batch budget"},
    {"strict", "--strict", KeyType::boolean, "Exit 4 when pims fails"},
    {"rank_k", "--rank-k", KeyType::integer, "Top-k size for rank agreement"},
};

constexpr const char* kCommands[] = {"ingest-report", "value", "coop", "bench-approx",
                                     "retail-curve", "pims", "metric-compare"};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_real(const std::string& text, const char* key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + text + "'");
  }
}

std::int64_t to_integer(const std::string& text, const char* key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + text + "'");
  }
}

std::uint64_t to_unsigned(const std::string& text, const char* key) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + text + "'");
  }
}

nlohmann::json flag_to_json(const KeySpec& spec, const std::string& raw) {
  switch (spec.type) {
    case KeyType::text: return raw;
    case KeyType::integer: return to_integer(raw, spec.key);
    case KeyType::unsigned_integer: return to_unsigned(raw, spec.key);
    case KeyType::real: return to_real(raw, spec.key);
    case KeyType::boolean: return raw == "true" || raw == "1";
    case KeyType::text_list: return split_list(raw);
    case KeyType::integer_list: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& s : split_list(raw)) arr.push_back(to_integer(s, spec.key));
      return arr;
    }
    case KeyType::real_list: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& s : split_list(raw)) arr.push_back(to_real(s, spec.key));
      return arr;
    }
  }
  return raw;
}

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& target) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    target = it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw DataError("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::size_t positive(std::int64_t v, const char* key) {
  if (v <= 0) throw ConfigError(std::string(key) + " must be positive");
  return static_cast<std::size_t>(v);
}

std::size_t non_negative(std::int64_t v, const char* key) {
  if (v < 0) throw ConfigError(std::string(key) + " must be non-negative");
  return static_cast<std::size_t>(v);
}

/// Shared state for one command run.
class Runner {
 public:
  Runner(RunConfig config, std::ostream& out, std::ostream& err)
      : config_(std::move(config)), out_(out), err_(err) {}

  int run();

 private:
  int ingest_report();
  int value();
  int coop();
  int bench_approx();
  int retail_curve();
  int pims();
  int metric_compare();

  void load();
  TimeGrid grid() const;
  DemandPanel panel_for(const std::optional<ZoneId>& zone) const;
  std::unique_ptr<ValuationGame> make_game();
  AlgorithmSpec algorithm_spec(const std::string& name, std::size_t rounds) const;
  std::uint64_t require_seed() const;
  void emit(const std::string& name, const std::string& content);
  void finish(ojson summary = ojson::object());

  RunConfig config_;
  std::ostream& out_;
  std::ostream& err_;
  std::optional<LoadResult> loaded_;
  Timestamp from_{};
  Timestamp to_{};
  std::vector<std::string> outputs_;
};

void Runner::load() {
  if (loaded_) return;
  if (config_.input.empty()) throw ConfigError("--input is required for this command");
  LoadOptions options;
  options.schema = parse_schema(config_.schema);
  if (!config_.source_column.empty()) options.source_column = config_.source_column;
  if (!config_.from.empty()) options.from = require_timestamp(config_.from, "from");
  if (!config_.to.empty()) options.to = require_timestamp(config_.to, "to");
  loaded_ = load_trips(config_.input, options);
  const auto& trips = loaded_->trips;
  if (trips.empty()) throw DataError("no trips accepted from '" + config_.input + "'");
  const auto [first_day, day_after_last] = day_window(trips);
  from_ = options.from.value_or(first_day);
  to_ = options.to.value_or(day_after_last);
  if (to_ <= from_) throw ConfigError("window end must be after its start");
}

TimeGrid Runner::grid() const {
  using namespace std::chrono;
  TimeGrid g = TimeGrid::covering(from_, to_, seconds(positive(config_.bin_width, "bin_width")));
  const Timestamp control = config_.control_start.empty()
                                ? to_ - days(14)
                                : require_timestamp(config_.control_start, "control_start");
  return split_windows(g, control);
}

DemandPanel Runner::panel_for(const std::optional<ZoneId>& zone) const {
  const TimeGrid g = grid();
  const auto by_source = bin_demand(loaded_->trips, g, zone);
  if (by_source.empty()) throw DataError("no trips for zone '" + zone.value_or(kCityWide) + "'");
  return top_k_with_tail(by_source, non_negative(config_.top_k, "top_k"), g, zone.value_or(kCityWide));
}

std::uint64_t Runner::require_seed() const {
  if (!config_.seed) throw ConfigError("--seed is required for stochastic commands");
  return *config_.seed;
}

AlgorithmSpec Runner::algorithm_spec(const std::string& name, std::size_t rounds) const {
  AlgorithmSpec spec;
  spec.algorithm = parse_algorithm(name);
  spec.rounds = rounds;
  spec.tau = config_.tau;
  if (!(config_.tau > 0.0 && config_.tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  spec.convergence_threshold = config_.conv_threshold;
  if (!(config_.conv_threshold > 0.0 && config_.conv_threshold < 1.0)) {
    throw ConfigError("conv_threshold must lie in (0, 1)");
  }
  spec.min_permutations = non_negative(config_.min_perms, "min_perms");
  spec.max_permutations = non_negative(config_.max_perms, "max_perms");
  spec.exact_limit = positive(config_.exact_limit, "exact_limit");
  return spec;
}

std::unique_ptr<ValuationGame> Runner::make_game() {
  const std::string& g = config_.game;
  if (g == "panel") {
    load();
    const std::optional<ZoneId> zone = config_.zone.empty() ? std::nullopt : std::optional<ZoneId>(config_.zone);
    return std::make_unique<ForecastValueGame>(panel_for(zone), make_forecaster(config_.forecaster),
                                               parse_metric(config_.metric));
  }
  const std::size_t n = positive(config_.players, "players");
  if (g == "saturating") {
    SaturatingParams p = default_saturating_params();
    p.n_players = n;
    p.heavy_count = (n * 10 + 8) / 16;
    return std::make_unique<SaturatingGame>(p, config_.game_seed);
  }
  if (g == "early-saturating") {
    SaturatingParams p = early_saturating_params();
    p.n_players = n;
    p.heavy_count = (n * 14 + 8) / 16;
    return std::make_unique<SaturatingGame>(p, config_.game_seed);
  }
  if (g == "additive") {
    Rng rng(config_.game_seed);
    std::vector<double> w(n);
    for (double& x : w) x = uniform_unit(rng);
    return std::make_unique<AdditiveGame>(std::move(w));
  }
  if (g == "complementary") return complementary_pair_game();
  throw ConfigError("unknown game '" + g + "'");
}

void Runner::emit(const std::string& name, const std::string& content) {
  write_atomic(fs::path(config_.out) / name, content);
  outputs_.push_back(name);
}

void Runner::finish(ojson summary) {
  ojson manifest;
  manifest["tool"] = "dataval";
  manifest["command"] = config_.command;
  manifest["config"] = config_.to_json();
  manifest["outputs"] = outputs_;
  if (!summary.empty()) manifest["summary"] = std::move(summary);
  write_atomic(fs::path(config_.out) / "manifest.json", dump(manifest));
  for (const auto& o : outputs_) out_ << (fs::path(config_.out) / o).string() << '\n';
  out_ << (fs::path(config_.out) / "manifest.json").string() << '\n';
}

int Runner::run() {
  fs::create_directories(config_.out);
  const std::string& c = config_.command;
  if (c == "ingest-report") return ingest_report();
  if (c == "value") return value();
  if (c == "coop") return coop();
  if (c == "bench-approx") return bench_approx();
  if (c == "retail-curve") return retail_curve();
  if (c == "pims") return pims();
  if (c == "metric-compare") return metric_compare();
  throw ConfigError("unknown command '" + c + "'");
}

int Runner::ingest_report() {
  load();
  const auto& trips = loaded_->trips;
  std::map<SourceId, std::size_t> per_source;
  for (const auto& t : trips) ++per_source[t.source_id];
  std::ostringstream csv;
  csv << "source_id,rides\n";
  for (const auto& [id, count] : per_source) csv << csv_field(id) << ',' << count << '\n';
  ojson report = loaded_->report.to_json();
  report["window"] = {{"from", format_iso8601(from_)}, {"to", format_iso8601(to_)}};
  report["sources"] = per_source.size();
  report["zones"] = distinct_zones(trips).size();
  emit("load_report.json", dump(report));
  emit("sources.csv", csv.str());
  finish();
  return exit_code::kOk;
}

int Runner::value() {
  load();
  if (config_.algos.size() != 1) throw ConfigError("value takes exactly one --algo");
  if (config_.rounds.empty()) throw ConfigError("rounds must not be empty");
  const AlgorithmSpec spec = algorithm_spec(config_.algos.front(), positive(config_.rounds.front(), "rounds"));
  const std::uint64_t seed = is_stochastic(spec.algorithm) ? require_seed() : 0;
  const std::optional<ZoneId> zone = config_.zone.empty() ? std::nullopt : std::optional<ZoneId>(config_.zone);
  DemandPanel panel = panel_for(zone);
  ForecastValueGame game(panel, make_forecaster(config_.forecaster), parse_metric(config_.metric));

  ApproxResult result;
  if (spec.algorithm == Algorithm::exact) {
    ExactOptions options;
    options.limit = spec.exact_limit;
    options.workers = config_.workers;
    if (game.n_players() >= 12) {
      options.progress = [this](std::uint64_t done, std::uint64_t total) {
        err_ << "evaluated " << done << "/" << total << " coalitions\n";
      };
    }
    result.phi = exact_shapley(game, options);
    result.tte = game.tte();
  } else {
    result = estimate_shapley(game, spec, seed, config_.workers);
  }

  ValuationMethod method;
  method.algorithm = std::string(algorithm_name(spec.algorithm));
  method.metric = config_.metric;
  if (spec.algorithm == Algorithm::rs || spec.algorithm == Algorithm::trs || spec.algorithm == Algorithm::ss ||
      spec.algorithm == Algorithm::tss) {
    method.rounds = spec.rounds;
  }
  if (is_truncated(spec.algorithm)) method.tau = spec.tau;
  if (spec.algorithm == Algorithm::mc || spec.algorithm == Algorithm::tmc) {
    method.convergence_threshold = spec.convergence_threshold;
  }
  if (is_stochastic(spec.algorithm)) method.seed = seed;
  const ValueReport report = make_value_report(panel, game, result.phi, method, result.tte);
  std::ostringstream csv;
  report.write_csv(csv);
  emit("value_report.csv", csv.str());
  emit("value_report.json", dump(report.to_json()));
  finish({{"v_full", report.v_full}, {"tte", report.tte}, {"sources", panel.n_sources()}});
  return exit_code::kOk;
}

int Runner::coop() {
  load();
  std::vector<ZoneId> zones = config_.zones.empty() ? distinct_zones(loaded_->trips) : config_.zones;
  const auto forecaster = make_forecaster(config_.forecaster);
  const Metric metric = parse_metric(config_.metric);
  std::ostringstream csv;
  csv << "zone,n_sources,v_all,mean_solo,benefit,forecastable";
  for (double t : config_.thresholds) csv << ",willing@" << format_real(t);
  csv << '\n';
  std::size_t skipped = 0, forecastable = 0;
  for (const auto& zone : zones) {
    const auto by_source = bin_demand(loaded_->trips, grid(), zone);
    if (by_source.size() < 2) {
      ++skipped;
      continue;
    }
    ForecastValueGame game(top_k_with_tail(by_source, non_negative(config_.top_k, "top_k"), grid(), zone),
                           forecaster, metric);
    const auto a = cooperation_benefit(game, zone, config_.thresholds, config_.floor);
    forecastable += a.forecastable ? 1 : 0;
    csv << csv_field(zone) << ',' << a.n_sources << ',' << format_real(a.v_all) << ','
        << format_real(a.mean_solo) << ',' << (a.benefit ? format_real(*a.benefit) : "") << ','
        << (a.forecastable ? "true" : "false");
    for (const auto& [t, w] : a.willing) csv << ',' << w;
    csv << '\n';
  }
  emit("coop.csv", csv.str());
  finish({{"zones", zones.size()}, {"forecastable", forecastable}, {"skipped_single_source", skipped}});
  return exit_code::kOk;
}

int Runner::bench_approx() {
  const std::uint64_t seed = require_seed();
  if (config_.reps < 2) throw ConfigError("reps must be at least 2");
  auto game = make_game();
  ExactOptions exact_options;
  exact_options.limit = positive(config_.exact_limit, "exact_limit");
  exact_options.workers = config_.workers;
  const auto exact_phi = exact_shapley(*game, exact_options);

  std::ostringstream csv;
  csv << "algorithm,label,rounds,tau,conv_threshold,repetitions,aaae,aape,aastd,mean_tte,mean_permutations\n";
  EvaluationOptions options;
  options.workers = config_.workers;
  for (const auto& name : config_.algos) {
    const Algorithm algo = parse_algorithm(name);
    const bool uses_rounds = algo != Algorithm::exact && algo != Algorithm::mc && algo != Algorithm::tmc;
    const std::vector<std::int64_t> rounds = uses_rounds ? config_.rounds : std::vector<std::int64_t>{0};
    for (std::int64_t r : rounds) {
      const AlgorithmSpec spec = algorithm_spec(name, uses_rounds ? positive(r, "rounds") : 1);
      const auto eval = evaluate_approximator(*game, spec, static_cast<std::size_t>(config_.reps), exact_phi,
                                              seed, options);
      csv << algorithm_name(algo) << ',' << spec.label() << ',' << (uses_rounds ? std::to_string(r) : "")
          << ',' << (is_truncated(algo) ? format_real(spec.tau) : "") << ','
          << ((algo == Algorithm::mc || algo == Algorithm::tmc) ? format_real(spec.convergence_threshold) : "")
          << ',' << eval.repetitions << ',' << format_real(eval.aaae) << ',' << format_real(eval.aape) << ','
          << format_real(eval.aastd) << ',' << format_real(eval.mean_tte) << ','
          << format_real(eval.mean_permutations) << '\n';
    }
  }
  emit("bench_approx.csv", csv.str());
  ojson exact = ojson::array();
  for (double x : exact_phi) exact.push_back(x);
  finish({{"players", game->n_players()}, {"exact_phi", exact}});
  return exit_code::kOk;
}

int Runner::retail_curve() {
  const std::uint64_t seed = require_seed();
  auto game = make_game();
  std::vector<std::size_t> ks;
  if (config_.k_values.empty()) {
    ks.resize(game->n_players());
    std::iota(ks.begin(), ks.end(), std::size_t{1});
  } else {
    for (auto k : config_.k_values) ks.push_back(positive(k, "k_values"));
  }
  for (std::size_t k : ks) {
    if (k > game->n_players()) throw ConfigError("k = " + std::to_string(k) + " exceeds the player count");
  }
  const auto curve = accuracy_probability_curve(*game, ks, positive(config_.samples_per_k, "samples_per_k"),
                                                config_.target_fraction, seed, config_.workers);
  std::ostringstream csv;
  csv << "k,probability,samples\n";
  for (const auto& p : curve) csv << p.k << ',' << format_real(p.probability) << ',' << p.samples << '\n';
  emit("retail_curve.csv", csv.str());
  finish({{"players", game->n_players()}, {"v_full", game->value(Coalition::full(game->n_players()))}});
  return exit_code::kOk;
}

int Runner::pims() {
  const std::uint64_t seed = require_seed();
  auto game = make_game();
  const auto r = pims_select(*game, config_.target, positive(config_.batch_size, "batch_size"),
                             non_negative(config_.max_batches, "max_batches"), seed);
  ojson j;
  j["success"] = r.success;
  j["value"] = r.value;
  j["batches_used"] = r.batches_used;
  j["selected"] = r.selected;
  if (auto* fg = dynamic_cast<ForecastValueGame*>(game.get())) {
    std::vector<std::string> ids;
    for (auto i : r.selected) ids.push_back(fg->panel().sources[i]);
    j["selected_sources"] = ids;
  }
  emit("pims.json", dump(j));
  finish({{"success", r.success}});
  if (!r.success && config_.strict) {
    throw InfeasibleError("pims: accuracy target not reached within " + std::to_string(config_.max_batches) +
                          " batches");
  }
  return exit_code::kOk;
}

int Runner::metric_compare() {
  load();
  if (config_.algos.size() != 1) throw ConfigError("metric-compare takes exactly one --algo");
  if (config_.rounds.empty()) throw ConfigError("rounds must not be empty");
  const AlgorithmSpec spec = algorithm_spec(config_.algos.front(), positive(config_.rounds.front(), "rounds"));
  const std::uint64_t seed = is_stochastic(spec.algorithm) ? require_seed() : 0;
  std::vector<Metric> metrics;
  for (const auto& m : config_.metrics) metrics.push_back(parse_metric(m));
  if (metrics.empty()) throw ConfigError("metrics must not be empty");
  const std::optional<ZoneId> zone = config_.zone.empty() ? std::nullopt : std::optional<ZoneId>(config_.zone);
  const DemandPanel panel = panel_for(zone);
  const auto cmp = metric_cross_validation(panel, make_forecaster(config_.forecaster), spec, metrics, seed,
                                           positive(config_.rank_k, "rank_k"), config_.workers);
  std::ostringstream csv;
  csv << "source_id";
  for (Metric m : metrics) csv << ",phi_" << metric_name(m) << ",share_" << metric_name(m);
  csv << '\n';
  for (std::size_t i = 0; i < panel.n_sources(); ++i) {
    csv << csv_field(panel.sources[i]);
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      csv << ',' << format_real(cmp.phi[k][i]) << ',' << format_real(cmp.shares[k][i]);
    }
    csv << '\n';
  }
  ojson pairs = ojson::array();
  for (const auto& p : cmp.pairs) {
    pairs.push_back({{"a", metric_name(p.a)},
                     {"b", metric_name(p.b)},
                     {"r2", p.r2},
                     {"top_k_agreement", p.top_k_agreement}});
  }
  emit("metric_compare.csv", csv.str());
  emit("metric_compare.json", dump(ojson{{"top_k", cmp.top_k}, {"pairs", pairs}}));
  finish();
  return exit_code::kOk;
}

void report_error(std::ostream& err, const char* kind, int code, const std::string& message) {
  ojson j{{"error", kind}, {"exit_code", code}, {"message", message}};
  err << j.dump() << '\n';
}

}  // namespace

nlohmann::ordered_json RunConfig::to_json() const {
  ojson j;
  j["input"] = input;
  j["schema"] = schema;
  j["from"] = from;
  j["to"] = to;
  j["zone"] = zone;
  j["zones"] = zones;
  j["source_column"] = source_column;
  j["top_k"] = top_k;
  j["bin_width"] = bin_width;
  j["control_start"] = control_start;
  j["forecaster"] = forecaster;
  j["metric"] = metric;
  j["metrics"] = metrics;
  j["algo"] = algos;
  j["rounds"] = rounds;
  j["tau"] = tau;
  j["conv_threshold"] = conv_threshold;
  j["min_perms"] = min_perms;
  j["max_perms"] = max_perms;
  j["exact_limit"] = exact_limit;
  j["reps"] = reps;
  j["seed"] = seed ? ojson(*seed) : ojson(nullptr);
  j["game"] = game;
  j["players"] = players;
  j["game_seed"] = game_seed;
  j["thresholds"] = thresholds;
  j["floor"] = floor;
  j["k_values"] = k_values;
  j["samples_per_k"] = samples_per_k;
  j["target_fraction"] = target_fraction;
  j["target"] = target;
  j["batch_size"] = batch_size;
  j["max_batches"] = max_batches;
  j["strict"] = strict;
  j["rank_k"] = rank_k;
  return j;
}

void RunConfig::apply_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(std::begin(kKeys), std::end(kKeys),
                                   [&](const KeySpec& k) { return key == k.key; });
    if (!known) throw ConfigError("unknown config key '" + key + "'");
  }
  read_key(j, "input", input);
  read_key(j, "schema", schema);
  read_key(j, "from", from);
  read_key(j, "to", to);
  read_key(j, "zone", zone);
  read_key(j, "zones", zones);
  read_key(j, "source_column", source_column);
  read_key(j, "top_k", top_k);
  read_key(j, "bin_width", bin_width);
  read_key(j, "control_start", control_start);
  read_key(j, "forecaster", forecaster);
  read_key(j, "metric", metric);
  read_key(j, "metrics", metrics);
  if (auto it = j.find("algo"); it != j.end() && it->is_string()) {
    algos = split_list(it->get<std::string>());
  } else {
    read_key(j, "algo", algos);
  }
  if (auto it = j.find("rounds"); it != j.end() && it->is_number_integer()) {
    rounds = {it->get<std::int64_t>()};
  } else {
    read_key(j, "rounds", rounds);
  }
  read_key(j, "tau", tau);
  read_key(j, "conv_threshold", conv_threshold);
  read_key(j, "min_perms", min_perms);
  read_key(j, "max_perms", max_perms);
  read_key(j, "exact_limit", exact_limit);
  read_key(j, "reps", reps);
  if (auto it = j.find("seed"); it != j.end()) {
    if (it->is_null()) {
      seed.reset();
    } else {
      std::uint64_t s = 0;
      read_key(j, "seed", s);
      seed = s;
    }
  }
  read_key(j, "game", game);
  read_key(j, "players", players);
  read_key(j, "game_seed", game_seed);
  read_key(j, "thresholds", thresholds);
  read_key(j, "floor", floor);
  read_key(j, "k_values", k_values);
  read_key(j, "samples_per_k", samples_per_k);
  read_key(j, "target_fraction", target_fraction);
  read_key(j, "target", target);
  read_key(j, "batch_size", batch_size);
  read_key(j, "max_batches", max_batches);
  read_key(j, "strict", strict);
  read_key(j, "rank_k", rank_k);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relative value of pooled spatio-temporal demand datasets", "dataval"};
  app.fallthrough();
  app.require_subcommand(1);

  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> options;
  for (const auto& k : kKeys) {
    if (k.type == KeyType::boolean) {
      options[k.key] = app.add_flag(k.flag, k.help);
    } else {
      options[k.key] = app.add_option(k.flag, raw[k.key], k.help);
    }
  }
  std::string config_path;
  std::size_t workers = 1;
  std::string out_dir = "dataval_out";
  app.add_option("--config", config_path, "JSON config file or a previous manifest.json");
  app.add_option("--workers", workers, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory");

  const std::map<std::string, std::string> descriptions = {
      {"ingest-report", "Load a trip CSV and report accepted and dropped rows"},
      {"value", "Shapley, LOO and volume values per source"},
      {"coop", "Benefit of cooperation per zone"},
      {"bench-approx", "Score approximators against exact Shapley"},
      {"retail-curve", "Probability of reaching a fraction of v(N) vs coalition size"},
      {"pims", "Buy random batches of sources until an accuracy target is met"},
      {"metric-compare", "Shapley shares under several similarity metrics"},
  };
  for (const char* c : kCommands) app.add_subcommand(c, descriptions.at(c));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "config_error", exit_code::kConfig, e.what());
    return exit_code::kConfig;
  }

  try {
    RunConfig config;
    config.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + config_path + "' is not valid JSON: " + e.what());
      }
      if (j.contains("config") && j["config"].is_object()) {
        if (j.contains("command") && j["command"] != config.command) {
          throw ConfigError("manifest was written by '" + j["command"].get<std::string>() + "', not '" +
                            config.command + "'");
        }
        j = j["config"];
      }
      config.apply_json(j);
    }
    nlohmann::json overrides = nlohmann::json::object();
    for (const auto& k : kKeys) {
      if (options[k.key]->count() == 0) continue;
      overrides[k.key] = k.type == KeyType::boolean ? nlohmann::json(true) : flag_to_json(k, raw[k.key]);
    }
    config.apply_json(overrides);
    config.workers = workers;
    config.out = out_dir;
    return Runner(std::move(config), out, err).run();
  } catch (const ConfigError& e) {
    report_error(err, "config_error", exit_code::kConfig, e.what());
    return exit_code::kConfig;
  } catch (const InfeasibleError& e) {
    report_error(err, "infeasible", exit_code::kInfeasible, e.what());
    return exit_code::kInfeasible;
  } catch (const DataError& e) {
    report_error(err, "data_error", exit_code::kData, e.what());
    return exit_code::kData;
  } catch (const ContractError& e) {
    report_error(err, "data_error", exit_code::kData, e.what());
    return exit_code::kData;
  } catch (const std::exception& e) {
    report_error(err, "internal_error", exit_code::kFailure, e.what());
    return exit_code::kFailure;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace dataval
