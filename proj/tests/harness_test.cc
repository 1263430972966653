#include <cmath>
#include <filesystem>
#include <iterator>
#include <limits>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "maxlin/csv_io.h"
#include "maxlin/harness.h"

namespace maxlin {
namespace {

constexpr double kInfty = std::numeric_limits<double>::infinity();

std::size_t Count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

TrialSpec Spec(std::size_t n, std::size_t p, std::size_t k, double sigma, std::uint64_t seed) {
  TrialSpec s;
  s.n = n;
  s.p = p;
  s.k = k;
  s.sigma = sigma;
  s.seed = seed;
  return s;
}

GridRow Row(GridMode mode, std::size_t k, std::size_t p, std::size_t n, double err,
            Method m = Method::kCe) {
  GridRow r;
  r.mode = mode;
  r.k = k;
  r.p = p;
  r.n = n;
  r.method = m;
  r.trials = 3;
  r.median_error = err;
  r.finite_trials = std::isfinite(err) ? 3 : 0;
  return r;
}

// Relative luminance of "#rrggbb".
double Luminance(const std::string& hex) {
  const int r = std::stoi(hex.substr(1, 2), nullptr, 16);
  const int g = std::stoi(hex.substr(3, 2), nullptr, 16);
  const int b = std::stoi(hex.substr(5, 2), nullptr, 16);
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

TEST(RunTrialTest, NoiselessRecoveryForBothMethods) {
  const std::vector<Method> both = {Method::kCe, Method::kLspa};
  const auto results = RunTrial(Spec(300, 3, 2, 0.0, 4), both);
  ASSERT_EQ(results.size(), 2u);
  for (const TrialResult& r : results) {
    EXPECT_LT(r.normalized_error, 1e-5) << ToString(r.method);
    EXPECT_EQ(r.n, 300u);
    EXPECT_GE(r.wall_time, 0.0);
  }
  EXPECT_EQ(results[0].status, "optimal");
  EXPECT_EQ(results[1].status, "converged");
}

TEST(RunTrialTest, SingleSampleIsSolvedButNotRecovered) {
  const std::vector<Method> ce = {Method::kCe};
  const auto results = RunTrial(Spec(1, 3, 2, 0.0, 4), ce);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].status, "optimal");
  EXPECT_GT(results[0].normalized_error, 1e-2);
}

TEST(RunTrialTest, InvalidSpecIsRecordedNotThrown) {
  const std::vector<Method> ce = {Method::kCe};
  const auto results = RunTrial(Spec(10, 2, 4, 0.0, 1), ce);  // basis truth with k > p
  ASSERT_EQ(results.size(), 1u);
  EXPECT_TRUE(std::isinf(results[0].normalized_error));
  EXPECT_EQ(results[0].status.rfind("error:", 0), 0u);
}

TEST(RunTrialTest, MethodsSeeTheSameData) {
  const std::vector<Method> both = {Method::kCe, Method::kLspa};
  const std::vector<Method> ce = {Method::kCe};
  const std::vector<Method> lspa = {Method::kLspa};
  const TrialSpec s = Spec(60, 4, 3, 0.2, 17);
  const auto together = RunTrial(s, both);
  EXPECT_EQ(together[0].normalized_error, RunTrial(s, ce)[0].normalized_error);
  EXPECT_EQ(together[1].normalized_error, RunTrial(s, lspa)[0].normalized_error);
}

TEST(MedianErrorTest, Rules) {
  EXPECT_EQ(MedianError(std::vector<double>(50, 0.25)), 0.25);
  EXPECT_EQ(MedianError(std::vector<double>{4, 1, 3, 2}), 2.0);  // lower middle
  EXPECT_EQ(MedianError(std::vector<double>{5, 1, 3}), 3.0);
  // Half sentinels: median over the finite values.
  EXPECT_EQ(MedianError(std::vector<double>{kInfty, 1, kInfty, 2}), 1.0);
  EXPECT_TRUE(std::isinf(MedianError(std::vector<double>{kInfty, 1, kInfty})));
  EXPECT_TRUE(std::isinf(MedianError(std::vector<double>{})));
}

TEST(GridConfigTest, JsonRoundTripAndValidation) {
  const nlohmann::json j = {{"mode", "fix_k_vary_p"},
                            {"k", 3},
                            {"p_values", {4, 8}},
                            {"n_values", {50, 100}},
                            {"trials", 7},
                            {"master_seed", 12},
                            {"methods", {"ce", "lspa"}},
                            {"perturbation_scale", 1e-6}};
  const GridConfig c = GridConfigFromJson(j);
  EXPECT_EQ(c.k, 3u);
  EXPECT_EQ(c.trials, 7u);
  EXPECT_EQ(c.methods.size(), 2u);
  EXPECT_EQ(*c.perturbation_scale, 1e-6);
  EXPECT_EQ(GridConfigFromJson(ToJson(c)).p_values, c.p_values);

  auto with = [&](const char* key, nlohmann::json v) {
    nlohmann::json copy = j;
    copy[key] = std::move(v);
    return copy;
  };
  EXPECT_THROW(GridConfigFromJson(with("trials", 0)), std::invalid_argument);
  EXPECT_THROW(GridConfigFromJson(with("n_values", {100, 50})), std::invalid_argument);
  EXPECT_THROW(GridConfigFromJson(with("n_values", nlohmann::json::array())), std::invalid_argument);
  EXPECT_THROW(GridConfigFromJson(with("p_values", {2, 8})), std::invalid_argument);  // k > p
  EXPECT_THROW(GridConfigFromJson(with("mode", "sideways")), std::invalid_argument);
  EXPECT_THROW(GridConfigFromJson(with("methods", {"ce", "ce"})), std::invalid_argument);
  EXPECT_THROW(GridConfigFromJson(with("typo", 1)), std::invalid_argument);
  EXPECT_THROW(GridConfigFromJson(with("trials", "many")), std::invalid_argument);
}

TEST(RunGridTest, SingleCellSingleTrial) {
  GridConfig c;
  c.mode = GridMode::kFixKVaryP;
  c.k = 2;
  c.p_values = {3};
  c.n_values = {40};
  c.trials = 1;
  c.methods = {Method::kCe, Method::kLspa};
  const GridResult r = RunGrid(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.trials.size(), 2u);
  std::istringstream csv(GridCsv(r.rows));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 3u);
}

TEST(RunGridTest, DeterministicAcrossThreadCounts) {
  GridConfig c;
  c.mode = GridMode::kFixPVaryK;
  c.p = 4;
  c.k_values = {2, 3};
  c.n_values = {20, 60};
  c.sigma = 0.05;
  c.trials = 3;
  c.master_seed = 99;
  c.methods = {Method::kCe, Method::kLspa};
  c.threads = 1;
  const std::string a = GridCsv(RunGrid(c).rows);
  c.threads = 3;
  EXPECT_EQ(a, GridCsv(RunGrid(c).rows));
  c.master_seed = 100;
  EXPECT_NE(a, GridCsv(RunGrid(c).rows));
}

TEST(RunGridTest, RecoveryAppearsWithMoreSamples) {
  GridConfig c;
  c.mode = GridMode::kFixKVaryP;
  c.k = 3;
  c.p_values = {4, 8};
  c.n_values = {10, 50, 200, 800};
  c.trials = 5;
  c.master_seed = 3;
  const GridResult r = RunGrid(c);
  for (std::size_t p : {4u, 8u}) {
    double smallest = -1, largest = -1;
    for (const GridRow& row : r.rows) {
      if (row.p != p) continue;
      if (row.n == 10) smallest = row.median_error;
      if (row.n == 800) largest = row.median_error;
    }
    EXPECT_LT(largest, 1e-5) << "p=" << p;
    EXPECT_GT(smallest, 1e-2) << "p=" << p;
  }
}

TEST(GridCsvTest, RoundTripWithSentinels) {
  std::vector<GridRow> rows = {Row(GridMode::kFixKVaryP, 3, 4, 10, kInfty),
                               Row(GridMode::kFixKVaryP, 3, 4, 20, 1.25e-7, Method::kLspa)};
  rows[1].sigma = 0.1;
  const std::string csv = GridCsv(rows);
  EXPECT_NE(csv.find(",inf,"), std::string::npos);
  std::istringstream in(csv);
  const auto back = ReadGridCsv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_TRUE(std::isinf(back[0].median_error));
  EXPECT_EQ(back[1].median_error, 1.25e-7);
  EXPECT_EQ(back[1].sigma, 0.1);
  EXPECT_EQ(back[1].method, Method::kLspa);
  EXPECT_EQ(GridCsv(back), csv);

  for (const char* bad : {"", "mode,k\n", "mode,k,p,n,sigma,method,trials,median_error,finite_trials\n"
                                         "fix_k_vary_p,3,4,10,0,ce,3\n",
                          "mode,k,p,n,sigma,method,trials,median_error,finite_trials\n"
                          "fix_k_vary_p,3,4,x,0,ce,3,0.1,3\n"}) {
    std::istringstream s(bad);
    EXPECT_THROW(ReadGridCsv(s), CsvError) << bad;
  }
}

TEST(PhaseBoundaryTest, Examples) {
  const GridMode m = GridMode::kFixKVaryP;
  const std::vector<GridRow> rows = {
      // p = 4: all below threshold.
      Row(m, 2, 4, 10, 1e-9), Row(m, 2, 4, 20, 1e-9), Row(m, 2, 4, 40, 1e-10),
      // p = 5: none below.
      Row(m, 2, 5, 10, 0.5), Row(m, 2, 5, 20, kInfty), Row(m, 2, 5, 40, 1e-3),
      // p = 6: crosses once, listed out of order.
      Row(m, 2, 6, 40, 1e-12), Row(m, 2, 6, 10, 0.3), Row(m, 2, 6, 20, 1e-8),
      // p = 7: dips below then back up; only the tail counts.
      Row(m, 2, 7, 10, 1e-8), Row(m, 2, 7, 20, 0.1), Row(m, 2, 7, 40, 1e-9),
      // Other methods are ignored.
      Row(m, 2, 5, 40, 1e-12, Method::kLspa)};
  const auto b = PhaseBoundary(rows);
  ASSERT_EQ(b.size(), 4u);
  EXPECT_EQ(b[0].column, 4.0);
  EXPECT_EQ(b[0].n, 10u);
  EXPECT_FALSE(b[1].n.has_value());
  EXPECT_EQ(b[2].n, 20u);
  EXPECT_EQ(b[3].n, 40u);
}

TEST(HeatmapTest, CellCountAndAxes) {
  const GridMode m = GridMode::kFixKVaryP;
  const std::vector<GridRow> rows = {Row(m, 2, 4, 10, 0.5), Row(m, 2, 4, 20, 1e-9),
                                     Row(m, 2, 6, 10, 0.7), Row(m, 2, 6, 20, 1e-3)};
  const std::string svg = RenderHeatmap(rows);
  EXPECT_EQ(Count(svg, "<rect"), 4u);
  EXPECT_EQ(Count(svg, "class=\"cell\""), 4u);
  EXPECT_EQ(Count(svg, "<polyline"), 1u);
  EXPECT_NE(svg.find(">n</text>"), std::string::npos);
  EXPECT_NE(svg.find(">p</text>"), std::string::npos);
  EXPECT_EQ(svg.find("href"), std::string::npos);  // self-contained
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}

TEST(HeatmapTest, AllSentinelGrid) {
  const GridMode m = GridMode::kFixPVaryK;
  const std::vector<GridRow> rows = {Row(m, 2, 4, 10, kInfty), Row(m, 3, 4, 10, kInfty),
                                     Row(m, 2, 4, 20, kInfty)};
  const std::string svg = RenderHeatmap(rows);
  const std::regex grey_cell("class=\"cell\"[^>]*fill=\"" + std::string(kSentinelColor) + "\"");
  EXPECT_EQ(std::distance(std::sregex_iterator(svg.begin(), svg.end(), grey_cell),
                          std::sregex_iterator()),
            3);
  EXPECT_EQ(Count(svg, "class=\"cell\""), 3u);
  EXPECT_EQ(Count(svg, "<polyline"), 0u);
  EXPECT_NE(svg.find(">k</text>"), std::string::npos);
  EXPECT_THROW(RenderHeatmap(rows, Method::kLspa), std::invalid_argument);
  EXPECT_THROW(RenderHeatmap(std::vector<GridRow>{}), std::invalid_argument);
}

TEST(HeatmapTest, ColorsAreMonotoneInLogError) {
  double prev = -1;
  for (double e = -7.0; e <= 2.0; e += 0.25) {
    const std::string c = HeatmapColor(std::pow(10.0, e));
    ASSERT_TRUE(std::regex_match(c, std::regex("#[0-9a-f]{6}")));
    const double lum = Luminance(c);
    EXPECT_GE(lum, prev) << e;
    prev = lum;
  }
  EXPECT_EQ(HeatmapColor(1e-9), HeatmapColor(1e-6));  // clipped below
  EXPECT_EQ(HeatmapColor(100.0), HeatmapColor(10.0));  // clipped above
  EXPECT_LT(Luminance(HeatmapColor(1e-6)), Luminance(HeatmapColor(1e-3)));
  EXPECT_EQ(HeatmapColor(kInfty), std::string(kSentinelColor));
}

TEST(NoiseSweepTest, NoiselessCurveRecoversAndNoisyOnePlateaus) {
  GridConfig c;
  c.mode = GridMode::kNoiseSweep;
  c.k = 2;
  c.p = 3;
  c.sigma_values = {0.0, 0.2};
  c.n_values = {100, 400};
  c.trials = 3;
  c.master_seed = 5;
  c.methods = {Method::kCe, Method::kLspa};
  const GridResult r = RunGrid(c);
  for (const GridRow& row : r.rows) {
    if (row.method != Method::kCe || row.n != 400) continue;
    if (row.sigma == 0.0) {
      EXPECT_LT(row.median_error, 1e-5);
    } else {
      EXPECT_GT(row.median_error, 1e-3);
    }
  }
  EXPECT_EQ(GridCsv(r.rows), GridCsv(RunGrid(c).rows));

  const std::string svg = RenderNoiseSweep(r.rows);
  EXPECT_EQ(Count(svg, "class=\"panel\""), 2u);
  EXPECT_EQ(Count(svg, "<polyline class=\"ce\""), 2u);
  EXPECT_EQ(Count(svg, "<polyline class=\"lspa\""), 2u);
  EXPECT_EQ(Count(svg, "stroke-dasharray"), 2u);  // LSPA dotted
}

TEST(ShippedConfigsTest, AllLoadAndValidate) {
  std::size_t loaded = 0;
  for (const auto& entry : std::filesystem::directory_iterator(MAXLIN_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const GridConfig c = LoadGridConfig(entry.path().string());
    EXPECT_NO_THROW(c.Validate()) << entry.path();
    ++loaded;
  }
  EXPECT_GE(loaded, 5u);
}

}  // namespace
}  // namespace maxlin
