#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

#include "dataval/bench.hpp"
#include "dataval/cli.hpp"
#include "dataval/ingest.hpp"
#include "dataval/timeutil.hpp"
#include "dataval/valuation.hpp"

namespace dataval {
namespace {

namespace fs = std::filesystem;

const fs::path kData = DATAVAL_TEST_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("dataval_cli_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string dir(const std::string& name) const { return (root_ / name).string(); }

  fs::path root_;
};

TEST_F(CliTest, ValueIsEfficient) {
  const auto r = run({"value", "--input", (kData / "three_sources.csv").string(), "--out", dir("v")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(fs::path(dir("v")) / "value_report.json"));
  double sum = 0.0;
  for (const auto& s : j["sources"]) sum += s["shapley"].get<double>();
  EXPECT_NEAR(sum, j["v_full"].get<double>(), 1e-9);
  EXPECT_EQ(j["sources"].size(), 3u);
  EXPECT_TRUE(fs::exists(fs::path(dir("v")) / "value_report.csv"));
  EXPECT_TRUE(fs::exists(fs::path(dir("v")) / "manifest.json"));
}

TEST_F(CliTest, BenchApproxIsDeterministic) {
  const std::vector<std::string> base{"bench-approx", "--game", "saturating", "--algo", "rs,ss",
                                      "--rounds", "4", "--reps", "10", "--seed", "1"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", dir("a")});
  b.insert(b.end(), {"--out", dir("b"), "--workers", "3"});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  const auto csv = slurp(fs::path(dir("a")) / "bench_approx.csv");
  EXPECT_EQ(csv, slurp(fs::path(dir("b")) / "bench_approx.csv"));
  EXPECT_NE(csv.find("\nss,"), std::string::npos);
}

TEST_F(CliTest, ManifestRerunIsByteIdentical) {
  const std::vector<std::vector<std::string>> commands{
      {"value", "--input", (kData / "three_sources.csv").string(), "--algo", "tss", "--rounds", "3", "--seed", "5"},
      {"retail-curve", "--game", "saturating", "--samples-per-k", "30", "--seed", "8"},
      {"pims", "--game", "saturating", "--seed", "2"},
      {"metric-compare", "--input", (kData / "three_sources.csv").string()},
      {"coop", "--input", (kData / "five_zones.csv").string()},
      {"ingest-report", "--input", (kData / "five_zones.csv").string(), "--top-k", "2"},
  };
  int i = 0;
  for (auto args : commands) {
    const std::string first = dir("first" + std::to_string(i)), second = dir("second" + std::to_string(i));
    ++i;
    args.insert(args.end(), {"--out", first});
    const auto r1 = run(args);
    ASSERT_EQ(r1.code, 0) << args[0] << ": " << r1.err;
    const auto r2 = run({args[0], "--config", first + "/manifest.json", "--out", second, "--workers", "2"});
    ASSERT_EQ(r2.code, 0) << args[0] << ": " << r2.err;
    for (const auto& entry : fs::directory_iterator(first)) {
      const auto name = entry.path().filename();
      EXPECT_EQ(slurp(entry.path()), slurp(fs::path(second) / name)) << args[0] << " " << name;
    }
  }
}

TEST_F(CliTest, CoopMatchesLibrary) {
  const auto input = (kData / "five_zones.csv").string();
  const auto r = run({"coop", "--input", input, "--from", "2019-03-04", "--to", "2019-04-08", "--control-start",
                      "2019-03-25", "--thresholds", "0.1", "--out", dir("c")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(fs::path(dir("c")) / "coop.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "zone,n_sources,v_all,mean_solo,benefit,forecastable,willing@0.1");

  LoadOptions opt;
  opt.from = parse_iso8601("2019-03-04");
  opt.to = parse_iso8601("2019-04-08");
  const auto loaded = load_trips(input, opt);
  const auto grid = split_windows(TimeGrid::covering(*opt.from, *opt.to), *parse_iso8601("2019-03-25"));
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    const auto f = split_csv_line(line);
    ForecastValueGame game(top_k_with_tail(bin_demand(loaded.trips, grid, f[0]), 15, grid, f[0]),
                           make_forecaster("seasonal_profile"), Metric::cossim);
    const auto a = cooperation_benefit(game, f[0], {0.1});
    EXPECT_EQ(f[2], format_real(a.v_all)) << "zone " << f[0];
    EXPECT_EQ(f[3], format_real(a.mean_solo));
    EXPECT_EQ(f[6], std::to_string(a.willing[0].second));
    if (f[0] == "5") {
      EXPECT_EQ(f[6], "2");
      EXPECT_GT(std::stod(f[4]), 0.0);
    }
    ++rows;
  }
  EXPECT_EQ(rows, 5u);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"value", "--metric", "mape", "--input", (kData / "three_sources.csv").string(), "--out",
                 dir("x")}).code,
            exit_code::kConfig);
  EXPECT_EQ(run({"value", "--input", dir("missing.csv"), "--out", dir("x")}).code, exit_code::kData);
  EXPECT_EQ(run({"frobnicate"}).code, exit_code::kConfig);
  EXPECT_EQ(run({"pims", "--game", "saturating", "--out", dir("x")}).code, exit_code::kConfig);
  EXPECT_EQ(run({"value", "--input", (kData / "three_sources.csv").string(), "--exact-limit", "2", "--out",
                 dir("x")}).code,
            exit_code::kInfeasible);
  EXPECT_EQ(run({"pims", "--game", "saturating", "--target", "2", "--strict", "--seed", "1", "--out", dir("x")}).code,
            exit_code::kInfeasible);
  const auto r = run({"coop", "--input", (kData / "five_zones.csv").string(), "--bogus", "1"});
  EXPECT_EQ(r.code, exit_code::kConfig);
  const auto err = nlohmann::json::parse(r.err);
  EXPECT_EQ(err["exit_code"], exit_code::kConfig);
}

TEST_F(CliTest, ConfigFileRejectsUnknownKeys) {
  const auto cfg = root_ / "cfg.json";
  std::ofstream(cfg) << R"({"reps": 3, "colour": "blue"})";
  EXPECT_EQ(run({"bench-approx", "--config", cfg.string(), "--out", dir("x")}).code, exit_code::kConfig);
}

}  // namespace
}  // namespace dataval
