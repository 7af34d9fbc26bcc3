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

#include <sstream>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dataval/approx.hpp"
#include "dataval/bench.hpp"
#include "dataval/cli.hpp"
#include "dataval/errors.hpp"
#include "dataval/forecast.hpp"
#include "dataval/ingest.hpp"
#include "dataval/synthetic.hpp"
#include "dataval/timeutil.hpp"
#include "dataval/valuation.hpp"

namespace py = pybind11;
using namespace dataval;

namespace {

using Release = py::call_guard<py::gil_scoped_release>;

Coalition coalition_of(const ValuationGame& game, const std::vector<std::size_t>& members) {
  return Coalition::of(members, game.n_players());
}

TimeGrid make_grid(std::size_t observation_bins, std::size_t control_bins, std::int64_t bin_width,
                   const std::optional<std::string>& start) {
  TimeGrid grid;
  grid.bin_width = std::chrono::seconds(bin_width);
  if (start) grid.start = require_timestamp(*start, "start");
  grid.n_bins = observation_bins + control_bins;
  grid.observation = {0, observation_bins};
  grid.control = {observation_bins, grid.n_bins};
  return grid;
}

DemandPanel panel_from_series(const py::object& series, std::size_t observation_bins, std::int64_t bin_width,
                              const std::string& zone, const std::optional<std::string>& start) {
  std::vector<DemandSeries> list;
  auto add = [&](const py::handle& name, const py::handle& counts) {
    list.push_back({py::str(name), zone, counts.cast<std::vector<double>>()});
  };
  if (py::isinstance<py::dict>(series)) {
    for (auto [name, counts] : series.cast<py::dict>()) add(name, counts);
  } else {
    for (auto item : series) {
      auto pair = item.cast<py::sequence>();
      add(pair[0], pair[1]);
    }
  }
  if (list.empty()) throw ContractError("panel needs at least one source");
  const std::size_t n_bins = list.front().counts.size();
  if (observation_bins >= n_bins) throw ConfigError("observation window must leave a control window");
  auto grid = make_grid(observation_bins, n_bins - observation_bins, bin_width, start);
  grid.validate_split();
  return DemandPanel::from_series(grid, zone, std::move(list));
}

DemandPanel load_panel(const std::string& path, const std::string& schema, const std::optional<std::string>& zone,
                       std::size_t top_k, const std::optional<std::string>& control_start,
                       const std::optional<std::string>& from, const std::optional<std::string>& to,
                       const std::optional<std::string>& source_column, std::int64_t bin_width) {
  LoadOptions options;
  options.schema = parse_schema(schema);
  options.source_column = source_column;
  if (from) options.from = require_timestamp(*from, "from");
  if (to) options.to = require_timestamp(*to, "to");
  const auto loaded = load_trips(path, options);
  const auto [first_day, day_after_last] = day_window(loaded.trips);
  const Timestamp begin = options.from.value_or(first_day), end = options.to.value_or(day_after_last);
  auto grid = TimeGrid::covering(begin, end, std::chrono::seconds(bin_width));
  grid = split_windows(grid, control_start ? require_timestamp(*control_start, "control_start")
                                           : end - std::chrono::days(14));
  const auto by_source = bin_demand(loaded.trips, grid, zone);
  if (by_source.empty()) throw DataError("no trips for zone '" + zone.value_or(kCityWide) + "'");
  return top_k_with_tail(by_source, top_k, grid, zone.value_or(kCityWide));
}

PanelSpec panel_spec(std::size_t observation_weeks, std::size_t control_weeks, double noise_sigma,
                     std::uint64_t seed) {
  PanelSpec spec;
  spec.observation_weeks = observation_weeks;
  spec.control_weeks = control_weeks;
  spec.noise_sigma = noise_sigma;
  spec.seed = seed;
  return spec;
}

py::dict approx_dict(const ApproxResult& r) {
  py::dict d;
  d["phi"] = r.phi;
  d["tte"] = r.tte;
  d["permutations_used"] = r.permutations_used;
  d["truncation_skips"] = r.truncation_skips;
  return d;
}

AlgorithmSpec make_spec(const std::string& algorithm, std::size_t rounds, double tau, double threshold,
                        std::size_t exact_limit) {
  AlgorithmSpec spec;
  spec.algorithm = parse_algorithm(algorithm);
  spec.rounds = rounds;
  spec.tau = tau;
  spec.convergence_threshold = threshold;
  spec.exact_limit = exact_limit;
  return spec;
}

SamplePlan plan_from(const ValuationGame& game, std::vector<Permutation> permutations) {
  SamplePlan plan;
  plan.n_players = game.n_players();
  plan.permutations = std::move(permutations);
  return plan;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Shapley valuation of pooled demand datasets";

  auto base_error = py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<OutOfRangeError>(m, "OutOfRangeError", base_error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

  m.def(
      "coalition_bits",
      [](const std::vector<std::size_t>& members, std::size_t n) { return Coalition::of(members, n).bits(); },
      py::arg("members"), py::arg("n_players"), "Canonical bitmask of a member set (n_players <= 64).");

  // Metrics and forecasting.
  m.def("cosine_similarity", [](const std::vector<double>& t, const std::vector<double>& p) {
    return cosine_similarity(t, p);
  });
  m.def("numerical_similarity", [](const std::vector<double>& t, const std::vector<double>& p) {
    return numerical_similarity(t, p);
  });
  m.def("dtw_distance", [](const std::vector<double>& a, const std::vector<double>& b) { return dtw_distance(a, b); });
  m.def("relative_dtw", [](const std::vector<double>& t, const std::vector<double>& p) { return relative_dtw(t, p); });
  m.def(
      "similarity",
      [](const std::string& metric, const std::vector<double>& t, const std::vector<double>& p) {
        return similarity(parse_metric(metric), t, p);
      },
      py::arg("metric"), py::arg("truth"), py::arg("pred"));
  m.def(
      "seasonal_profile_forecast",
      [](const std::vector<double>& observed, std::size_t control_bins, std::int64_t bin_width) {
        const auto grid = make_grid(observed.size(), control_bins, bin_width, std::nullopt);
        return SeasonalProfileForecaster().fit_predict(observed, grid).values;
      },
      py::arg("observed"), py::arg("control_bins"), py::arg("bin_width") = 3600,
      "Forecast control_bins values from the observed series with the hour-of-week profile model.");

  // Panels.
  py::class_<DemandPanel>(m, "Panel")
      .def_static("from_series", &panel_from_series, py::arg("series"), py::arg("observation_bins"),
                  py::arg("bin_width") = 3600, py::arg("zone") = kCityWide, py::arg("start") = std::nullopt)
      .def_property_readonly("zone", [](const DemandPanel& p) { return p.zone; })
      .def_property_readonly("sources", [](const DemandPanel& p) { return p.sources; })
      .def_property_readonly("n_sources", &DemandPanel::n_sources)
      .def_property_readonly("n_bins", [](const DemandPanel& p) { return p.grid.n_bins; })
      .def_property_readonly("observation_bins", [](const DemandPanel& p) { return p.grid.observation.size(); })
      .def_property_readonly("control_bins", [](const DemandPanel& p) { return p.grid.control.size(); })
      .def_property_readonly("start", [](const DemandPanel& p) { return format_iso8601(p.grid.start); })
      .def_property_readonly("series",
                             [](const DemandPanel& p) {
                               std::vector<std::vector<double>> out;
                               for (const auto& s : p.series) out.push_back(s.counts);
                               return out;
                             })
      .def_property_readonly("ground_truth", [](const DemandPanel& p) { return p.ground_truth.counts; })
      .def("__repr__", [](const DemandPanel& p) {
        return "<Panel zone=" + p.zone + " sources=" + std::to_string(p.n_sources()) +
               " bins=" + std::to_string(p.grid.n_bins) + ">";
      });
  m.def("load_panel", &load_panel, py::arg("path"), py::arg("schema") = "generic", py::arg("zone") = std::nullopt,
        py::arg("top_k") = 15, py::arg("control_start") = std::nullopt, py::arg("from_") = std::nullopt,
        py::arg("to") = std::nullopt, py::arg("source_column") = std::nullopt, py::arg("bin_width") = 3600,
        "Load a trip CSV and build a top-k + TAIL panel; the control window defaults to the last 14 days.");
  m.def(
      "scaled_copies_panel",
      [](const std::vector<double>& rates, std::size_t observation_weeks, std::size_t control_weeks,
         double noise_sigma, std::uint64_t seed, std::uint64_t shape_seed) {
        return scaled_copies_panel(weekly_demand_shape(168, shape_seed), rates,
                                   panel_spec(observation_weeks, control_weeks, noise_sigma, seed));
      },
      py::arg("rates"), py::arg("observation_weeks") = 4, py::arg("control_weeks") = 2, py::arg("noise_sigma") = 0.0,
      py::arg("seed") = 0, py::arg("shape_seed") = 1);
  m.def(
      "complementary_pair_panel",
      [](double rate, double noise_sigma, std::uint64_t seed) {
        return complementary_pair_panel(panel_spec(4, 2, noise_sigma, seed), rate);
      },
      py::arg("rate") = 10.0, py::arg("noise_sigma") = 0.0, py::arg("seed") = 0);
  m.def(
      "night_coverage_panel",
      [](double noise_sigma, std::uint64_t seed) { return night_coverage_panel(panel_spec(4, 2, noise_sigma, seed)); },
      py::arg("noise_sigma") = 0.0, py::arg("seed") = 0);
  m.def("volume_shares", &volume_shares, py::arg("panel"));

  // Games.
  py::class_<ValuationGame>(m, "Game")
      .def_property_readonly("n_players", &ValuationGame::n_players)
      .def(
          "value",
          [](ValuationGame& g, const std::vector<std::size_t>& members) { return g.value(coalition_of(g, members)); },
          py::arg("members"))
      .def_property_readonly("tte", &ValuationGame::tte)
      .def("reset", &ValuationGame::reset);

  py::class_<ForecastValueGame, ValuationGame>(m, "ForecastValueGame")
      .def(py::init([](const DemandPanel& panel, const std::string& metric, const std::string& forecaster) {
             return std::make_unique<ForecastValueGame>(panel, make_forecaster(forecaster), parse_metric(metric));
           }),
           py::arg("panel"), py::arg("metric") = "cossim", py::arg("forecaster") = "seasonal_profile");

  py::class_<TableGame, ValuationGame>(m, "TableGame")
      .def(py::init<std::size_t, std::vector<double>>(), py::arg("n_players"), py::arg("values"));

  py::class_<AdditiveGame, ValuationGame>(m, "AdditiveGame")
      .def(py::init<std::vector<double>>(), py::arg("weights"));

  py::class_<SaturatingGame, ValuationGame>(m, "SaturatingGame")
      .def(py::init([](std::size_t n, std::size_t heavy, double beta, double noise_scale, double v_max,
                       std::uint64_t seed) {
             SaturatingParams p;
             p.n_players = n;
             p.heavy_count = heavy;
             p.beta = beta;
             p.noise_scale = noise_scale;
             p.v_max = v_max;
             return std::make_unique<SaturatingGame>(p, seed);
           }),
           py::arg("n_players") = 16, py::arg("heavy_count") = 10, py::arg("beta") = 0.3,
           py::arg("noise_scale") = 0.004, py::arg("v_max") = 1.0, py::arg("seed") = 0)
      .def("closed_form_shapley", &SaturatingGame::closed_form_shapley)
      .def_property_readonly("heavy", [](const SaturatingGame& g) { return g.heavy().members(); });

  py::class_<UnanimityGame, ValuationGame>(m, "UnanimityGame")
      .def(py::init<std::size_t, std::vector<std::size_t>>(), py::arg("n_players"), py::arg("carrier"));
  m.def("complementary_pair_game", &complementary_pair_game);

  py::class_<FunctionGame, ValuationGame>(m, "FunctionGame")
      .def(py::init([](std::size_t n, py::function fn) {
             // The callable may run on worker threads; take the GIL for it.
             auto guarded = std::shared_ptr<py::function>(new py::function(std::move(fn)), [](py::function* f) {
               py::gil_scoped_acquire gil;
               delete f;
             });
             return std::make_unique<FunctionGame>(n, [guarded](const Coalition& c) {
               py::gil_scoped_acquire gil;
               return (*guarded)(c.members()).cast<double>();
             });
           }),
           py::arg("n_players"), py::arg("fn"), "Game whose value is fn(sorted member list).");

  // Exact values and heuristics.
  m.def(
      "exact_shapley",
      [](ValuationGame& game, std::size_t workers, std::size_t limit) {
        ExactOptions opt;
        opt.workers = workers;
        opt.limit = limit;
        return exact_shapley(game, opt);
      },
      py::arg("game"), py::arg("workers") = 1, py::arg("limit") = kDefaultExactLimit, Release());
  m.def("leave_one_out", &leave_one_out, py::arg("game"), Release());
  m.def("normalized_shares", &normalized_shares, py::arg("phi"));

  // Approximation.
  m.def("latin_square", &build_latin_square, py::arg("n"));
  m.def(
      "ss_plan", [](std::size_t n, std::size_t r, std::uint64_t seed) { return ss_plan(n, r, seed).permutations; },
      py::arg("n"), py::arg("rounds"), py::arg("seed"));
  m.def(
      "rs_plan", [](std::size_t n, std::size_t r, std::uint64_t seed) { return rs_plan(n, r, seed).permutations; },
      py::arg("n"), py::arg("rounds"), py::arg("seed"));
  m.def(
      "run_plan",
      [](ValuationGame& game, std::vector<Permutation> plan, std::optional<double> tau, std::size_t workers) {
        ApproxResult r;
        {
          py::gil_scoped_release release;
          r = run_plan(game, plan_from(game, std::move(plan)), tau ? TruncationPolicy::at(*tau) : TruncationPolicy{},
                       workers);
        }
        return approx_dict(r);
      },
      py::arg("game"), py::arg("plan"), py::arg("tau") = std::nullopt, py::arg("workers") = 1);
  m.def(
      "mc_shapley",
      [](ValuationGame& game, double threshold, std::uint64_t seed, std::optional<double> tau, std::size_t min_perms,
         std::size_t max_perms) {
        McOptions opt;
        opt.convergence_threshold = threshold;
        opt.seed = seed;
        if (tau) opt.truncation = TruncationPolicy::at(*tau);
        opt.min_permutations = min_perms;
        opt.max_permutations = max_perms;
        ApproxResult r;
        {
          py::gil_scoped_release release;
          r = mc_shapley(game, opt);
        }
        return approx_dict(r);
      },
      py::arg("game"), py::arg("threshold") = 0.01, py::arg("seed") = 0, py::arg("tau") = std::nullopt,
      py::arg("min_permutations") = 0, py::arg("max_permutations") = 0);
  m.def(
      "estimate_shapley",
      [](ValuationGame& game, const std::string& algorithm, std::size_t rounds, double tau, double threshold,
         std::uint64_t seed, std::size_t workers, std::size_t exact_limit) {
        const auto spec = make_spec(algorithm, rounds, tau, threshold, exact_limit);
        ApproxResult r;
        {
          py::gil_scoped_release release;
          r = estimate_shapley(game, spec, seed, workers);
        }
        return approx_dict(r);
      },
      py::arg("game"), py::arg("algorithm") = "exact", py::arg("rounds") = 4, py::arg("tau") = 0.95,
      py::arg("threshold") = 0.01, py::arg("seed") = 0, py::arg("workers") = 1,
      py::arg("exact_limit") = kDefaultExactLimit);

  // Benchmarks and analyses.
  m.def(
      "evaluate_approximator",
      [](ValuationGame& game, const std::string& algorithm, std::size_t repetitions,
         const std::vector<double>& exact_phi, std::uint64_t seed, std::size_t rounds, double tau, double threshold,
         std::size_t workers) {
        const auto spec = make_spec(algorithm, rounds, tau, threshold, kDefaultExactLimit);
        EvaluationOptions opt;
        opt.workers = workers;
        ApproximatorEvaluation e;
        {
          py::gil_scoped_release release;
          e = evaluate_approximator(game, spec, repetitions, exact_phi, seed, opt);
        }
        py::dict d;
        d["label"] = spec.label();
        d["repetitions"] = e.repetitions;
        d["aaae"] = e.aaae;
        d["aape"] = e.aape;
        d["aastd"] = e.aastd;
        d["mean_tte"] = e.mean_tte;
        d["mean_permutations"] = e.mean_permutations;
        d["estimates"] = e.estimates;
        return d;
      },
      py::arg("game"), py::arg("algorithm"), py::arg("repetitions"), py::arg("exact_phi"), py::arg("seed"),
      py::arg("rounds") = 4, py::arg("tau") = 0.95, py::arg("threshold") = 0.01, py::arg("workers") = 1);
  m.def(
      "cooperation_benefit",
      [](ValuationGame& game, const std::string& zone, const std::vector<double>& thresholds, double floor) {
        const auto a = cooperation_benefit(game, zone, thresholds, floor);
        py::dict d;
        d["zone"] = a.zone;
        d["n_sources"] = a.n_sources;
        d["v_all"] = a.v_all;
        d["solo"] = a.solo;
        d["mean_solo"] = a.mean_solo;
        d["benefit"] = a.benefit;
        d["forecastable"] = a.forecastable;
        d["willing"] = a.willing;
        return d;
      },
      py::arg("game"), py::arg("zone") = kCityWide, py::arg("thresholds") = std::vector<double>{0.1, 0.2},
      py::arg("floor") = kDefaultAccuracyFloor);
  m.def(
      "accuracy_probability_curve",
      [](ValuationGame& game, const std::vector<std::size_t>& k_values, std::size_t samples_per_k,
         double target_fraction, std::uint64_t seed, std::size_t workers) {
        std::vector<CurvePoint> curve;
        {
          py::gil_scoped_release release;
          curve = accuracy_probability_curve(game, k_values, samples_per_k, target_fraction, seed, workers);
        }
        std::vector<std::pair<std::size_t, double>> out;
        for (const auto& p : curve) out.emplace_back(p.k, p.probability);
        return out;
      },
      py::arg("game"), py::arg("k_values"), py::arg("samples_per_k") = 100, py::arg("target_fraction") = 0.95,
      py::arg("seed") = 0, py::arg("workers") = 1);
  m.def(
      "pims_select",
      [](ValuationGame& game, double target, std::size_t batch_size, std::size_t max_batches, std::uint64_t seed) {
        const auto r = pims_select(game, target, batch_size, max_batches, seed);
        py::dict d;
        d["success"] = r.success;
        d["selected"] = r.selected;
        d["value"] = r.value;
        d["batches_used"] = r.batches_used;
        return d;
      },
      py::arg("game"), py::arg("target"), py::arg("batch_size") = 5, py::arg("max_batches") = 10,
      py::arg("seed") = 0);
  m.def("coefficient_of_determination", &coefficient_of_determination, py::arg("a"), py::arg("b"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a dataval command; returns (exit_code, stdout, stderr).");
}
