#ifndef MAXLIN_HARNESS_H_
#define MAXLIN_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "maxlin/synth.h"

namespace maxlin {

enum class GridMode { kFixKVaryP, kFixPVaryK, kNoiseSweep };
enum class Method { kCe, kLspa };

std::string_view ToString(GridMode mode);
std::string_view ToString(Method method);
GridMode ParseGridMode(std::string_view s);
Method ParseMethod(std::string_view s);

struct GridConfig {
  GridMode mode = GridMode::kFixKVaryP;
  // Fixed dimensions: k for fix_k_vary_p, p for fix_p_vary_k, both for
  // noise_sweep.
  std::size_t k = 0;
  std::size_t p = 0;
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> p_values;      // fix_k_vary_p
  std::vector<std::size_t> k_values;      // fix_p_vary_k
  std::vector<double> sigma_values;       // noise_sweep
  double sigma = 0.0;                     // grid modes
  std::size_t trials = 50;
  TruthKind truth_kind = TruthKind::kStandardBasis;
  std::uint64_t master_seed = 0;
  std::vector<Method> methods = {Method::kCe};
  std::optional<double> perturbation_scale;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::size_t max_iter = 200;  // LSPA iteration cap

  // Throws std::invalid_argument when the invariants do not hold.
  void Validate() const;
};

// Unknown keys and wrongly typed values throw std::invalid_argument.
GridConfig GridConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const GridConfig& config);
GridConfig LoadGridConfig(const std::string& path);

struct TrialResult {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t k = 0;
  double sigma = 0.0;
  Method method = Method::kCe;
  // +inf when the fit failed or produced no estimate.
  double normalized_error = 0.0;
  std::string status;
  double wall_time = 0.0;  // seconds
  std::uint64_t seed = 0;
};

struct TrialSpec {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t k = 0;
  double sigma = 0.0;
  TruthKind truth_kind = TruthKind::kStandardBasis;
  std::uint64_t seed = 0;
  std::optional<double> perturbation_scale;
  std::size_t max_iter = 200;
};

// One synthetic instance, each method fitted to the same data and the same
// initialization with eta computed from the realized noise. Failures are
// recorded as sentinel results, never thrown.
std::vector<TrialResult> RunTrial(const TrialSpec& spec, std::span<const Method> methods);

// Cell seed from the master seed and the cell's (n, p, k). Sigma is held out
// so noise sweeps reuse X, the truth and the initialization across noise
// levels.
std::uint64_t CellSeed(std::uint64_t master, std::size_t n, std::size_t p, std::size_t k);
std::uint64_t TrialSeed(std::uint64_t cell_seed, std::size_t trial);

struct GridRow {
  GridMode mode = GridMode::kFixKVaryP;
  std::size_t k = 0;
  std::size_t p = 0;
  std::size_t n = 0;
  double sigma = 0.0;
  Method method = Method::kCe;
  std::size_t trials = 0;
  double median_error = 0.0;  // +inf sentinel
  std::size_t finite_trials = 0;
};

struct GridResult {
  std::vector<GridRow> rows;       // column value, then n, then method
  std::vector<TrialResult> trials;  // same order, trials innermost
};

// Median over the finite errors, lower-middle for an even count; +inf if
// more than half of the values are +inf or the input is empty.
double MedianError(std::span<const double> errors);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Deterministic given the config: trials run concurrently and are reduced in
// cell order.
GridResult RunGrid(const GridConfig& config, const ProgressFn& progress = {});

// Columns: mode,k,p,n,sigma,method,trials,median_error,finite_trials.
void WriteGridCsv(std::ostream& out, std::span<const GridRow> rows);
std::string GridCsv(std::span<const GridRow> rows);
// Throws CsvError on malformed input.
std::vector<GridRow> ReadGridCsv(std::istream& in);
std::vector<GridRow> LoadGridCsv(const std::string& path);

void WriteTrialsCsv(std::ostream& out, std::span<const TrialResult> trials);

// The varying dimension of a row: p, k or sigma depending on the mode.
double ColumnValue(const GridRow& row);

struct BoundaryPoint {
  double column = 0.0;
  std::optional<std::size_t> n;  // absent if no n qualifies
};

// Per column, the smallest n such that the median error at n and every
// larger n in the column is below `threshold`. Rows of other methods are
// ignored.
std::vector<BoundaryPoint> PhaseBoundary(std::span<const GridRow> rows,
                                         Method method = Method::kCe,
                                         double threshold = 1e-5);

// "#rrggbb" for a median error: log10 clipped to [-6, 1] on a ramp that is
// monotone in luminance. The sentinel maps to kSentinelColor.
inline constexpr std::string_view kSentinelColor = "#9e9e9e";
std::string HeatmapColor(double error);

// Self-contained SVG heatmap of one method's medians: one <rect class="cell">
// per cell, the phase boundary as a green polyline. Throws
// std::invalid_argument if no rows match.
std::string RenderHeatmap(std::span<const GridRow> rows, Method method = Method::kCe,
                          double threshold = 1e-5);

// One panel per sigma of log10 median error against n; CE solid, LSPA dotted.
std::string RenderNoiseSweep(std::span<const GridRow> rows);

}  // namespace maxlin

#endif  // MAXLIN_HARNESS_H_
