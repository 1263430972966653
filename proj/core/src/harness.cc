#include "maxlin/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "maxlin/ce.h"
#include "maxlin/csv_io.h"
#include "maxlin/lspa.h"
#include "maxlin/parallel.h"
#include "maxlin/rng.h"

namespace maxlin {

namespace {

constexpr double kSentinel = std::numeric_limits<double>::infinity();

template <typename T>
void RequireIncreasing(const std::vector<T>& v, const char* name) {
  if (v.empty()) throw std::invalid_argument(std::string("GridConfig: ") + name + " is empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i - 1] < v[i])) {
      throw std::invalid_argument(std::string("GridConfig: ") + name +
                                  " must be strictly increasing");
    }
  }
}

struct Cell {
  std::size_t n, p, k;
  double sigma;
};

std::vector<Cell> EnumerateCells(const GridConfig& c) {
  std::vector<Cell> cells;
  switch (c.mode) {
    case GridMode::kFixKVaryP:
      for (std::size_t p : c.p_values)
        for (std::size_t n : c.n_values) cells.push_back({n, p, c.k, c.sigma});
      break;
    case GridMode::kFixPVaryK:
      for (std::size_t k : c.k_values)
        for (std::size_t n : c.n_values) cells.push_back({n, c.p, k, c.sigma});
      break;
    case GridMode::kNoiseSweep:
      for (double s : c.sigma_values)
        for (std::size_t n : c.n_values) cells.push_back({n, c.p, c.k, s});
      break;
  }
  return cells;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

template <typename T>
T JsonGet(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("GridConfig: bad value for '") + key +
                                "': " + e.what());
  }
}

std::size_t ParseSize(std::string_view s) {
  const double v = ParseDouble(s);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw CsvError("grid CSV: expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return static_cast<std::size_t>(v);
}

std::string Hex(int r, int g, int b) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

// SVG coordinate with at most two decimals and no trailing zeros.
std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s == "-0" ? "0" : s;
}

std::string AxisLabel(GridMode mode) {
  switch (mode) {
    case GridMode::kFixKVaryP: return "p";
    case GridMode::kFixPVaryK: return "k";
    case GridMode::kNoiseSweep: return "sigma";
  }
  return "";
}

constexpr double kLogMin = -6.0;
constexpr double kLogMax = 1.0;

double ClippedLog(double error) {
  if (error <= 0.0) return kLogMin;
  return std::clamp(std::log10(error), kLogMin, kLogMax);
}

}  // namespace

std::string_view ToString(GridMode mode) {
  switch (mode) {
    case GridMode::kFixKVaryP: return "fix_k_vary_p";
    case GridMode::kFixPVaryK: return "fix_p_vary_k";
    case GridMode::kNoiseSweep: return "noise_sweep";
  }
  return "unknown";
}

std::string_view ToString(Method method) {
  return method == Method::kCe ? "ce" : "lspa";
}

GridMode ParseGridMode(std::string_view s) {
  if (s == "fix_k_vary_p") return GridMode::kFixKVaryP;
  if (s == "fix_p_vary_k") return GridMode::kFixPVaryK;
  if (s == "noise_sweep") return GridMode::kNoiseSweep;
  throw std::invalid_argument("unknown grid mode '" + std::string(s) + "'");
}

Method ParseMethod(std::string_view s) {
  if (s == "ce") return Method::kCe;
  if (s == "lspa") return Method::kLspa;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

void GridConfig::Validate() const {
  if (trials == 0) throw std::invalid_argument("GridConfig: trials must be >= 1");
  if (max_iter == 0) throw std::invalid_argument("GridConfig: max_iter must be >= 1");
  if (methods.empty()) throw std::invalid_argument("GridConfig: methods is empty");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = i + 1; j < methods.size(); ++j) {
      if (methods[i] == methods[j]) throw std::invalid_argument("GridConfig: duplicate method");
    }
  }
  RequireIncreasing(n_values, "n_values");
  if (n_values.front() == 0) throw std::invalid_argument("GridConfig: n must be >= 1");
  switch (mode) {
    case GridMode::kFixKVaryP:
      RequireIncreasing(p_values, "p_values");
      if (k == 0 || p_values.front() == 0) {
        throw std::invalid_argument("GridConfig: k and p must be >= 1");
      }
      break;
    case GridMode::kFixPVaryK:
      RequireIncreasing(k_values, "k_values");
      if (p == 0 || k_values.front() == 0) {
        throw std::invalid_argument("GridConfig: k and p must be >= 1");
      }
      break;
    case GridMode::kNoiseSweep:
      RequireIncreasing(sigma_values, "sigma_values");
      if (k == 0 || p == 0) throw std::invalid_argument("GridConfig: k and p must be >= 1");
      if (!(sigma_values.front() >= 0.0) || !std::isfinite(sigma_values.back())) {
        throw std::invalid_argument("GridConfig: sigma values must be finite and >= 0");
      }
      break;
  }
  if (mode != GridMode::kNoiseSweep && !(sigma >= 0.0 && std::isfinite(sigma))) {
    throw std::invalid_argument("GridConfig: sigma must be finite and >= 0");
  }
  if (perturbation_scale && !(*perturbation_scale >= 0.0 && std::isfinite(*perturbation_scale))) {
    throw std::invalid_argument("GridConfig: perturbation_scale must be finite and >= 0");
  }
  if (truth_kind == TruthKind::kStandardBasis) {
    for (const Cell& c : EnumerateCells(*this)) {
      if (c.k > c.p) throw std::invalid_argument("GridConfig: basis truth needs k <= p");
    }
  }
}

GridConfig GridConfigFromJson(const nlohmann::json& j) {
  static const std::set<std::string> kKeys = {
      "mode",   "k",      "p",           "n_values",    "p_values",
      "k_values", "sigma_values", "sigma", "trials", "truth",
      "master_seed", "methods", "perturbation_scale", "threads", "max_iter"};
  if (!j.is_object()) throw std::invalid_argument("GridConfig: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw std::invalid_argument("GridConfig: unknown key '" + key + "'");
  }
  GridConfig c;
  c.mode = ParseGridMode(JsonGet<std::string>(j, "mode"));
  if (j.contains("k")) c.k = JsonGet<std::size_t>(j, "k");
  if (j.contains("p")) c.p = JsonGet<std::size_t>(j, "p");
  c.n_values = JsonGet<std::vector<std::size_t>>(j, "n_values");
  if (j.contains("p_values")) c.p_values = JsonGet<std::vector<std::size_t>>(j, "p_values");
  if (j.contains("k_values")) c.k_values = JsonGet<std::vector<std::size_t>>(j, "k_values");
  if (j.contains("sigma_values")) {
    c.sigma_values = JsonGet<std::vector<double>>(j, "sigma_values");
  }
  if (j.contains("sigma")) c.sigma = JsonGet<double>(j, "sigma");
  if (j.contains("trials")) c.trials = JsonGet<std::size_t>(j, "trials");
  if (j.contains("truth")) c.truth_kind = ParseTruthKind(JsonGet<std::string>(j, "truth"));
  if (j.contains("master_seed")) c.master_seed = JsonGet<std::uint64_t>(j, "master_seed");
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& m : JsonGet<std::vector<std::string>>(j, "methods")) {
      c.methods.push_back(ParseMethod(m));
    }
  }
  if (j.contains("perturbation_scale") && !j.at("perturbation_scale").is_null()) {
    c.perturbation_scale = JsonGet<double>(j, "perturbation_scale");
  }
  if (j.contains("threads")) c.threads = JsonGet<std::size_t>(j, "threads");
  if (j.contains("max_iter")) c.max_iter = JsonGet<std::size_t>(j, "max_iter");
  c.Validate();
  return c;
}

nlohmann::json ToJson(const GridConfig& c) {
  nlohmann::json j;
  j["mode"] = ToString(c.mode);
  j["k"] = c.k;
  j["p"] = c.p;
  j["n_values"] = c.n_values;
  j["p_values"] = c.p_values;
  j["k_values"] = c.k_values;
  j["sigma_values"] = c.sigma_values;
  j["sigma"] = c.sigma;
  j["trials"] = c.trials;
  j["truth"] = ToString(c.truth_kind);
  j["master_seed"] = c.master_seed;
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.emplace_back(ToString(m));
  j["methods"] = methods;
  j["perturbation_scale"] =
      c.perturbation_scale ? nlohmann::json(*c.perturbation_scale) : nlohmann::json(nullptr);
  j["threads"] = c.threads;
  j["max_iter"] = c.max_iter;
  return j;
}

GridConfig LoadGridConfig(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return GridConfigFromJson(j);
}

std::vector<TrialResult> RunTrial(const TrialSpec& spec, std::span<const Method> methods) {
  std::vector<TrialResult> out;
  auto base = [&](Method m) {
    TrialResult r;
    r.n = spec.n;
    r.p = spec.p;
    r.k = spec.k;
    r.sigma = spec.sigma;
    r.method = m;
    r.normalized_error = kSentinel;
    r.seed = spec.seed;
    return r;
  };

  SynthConfig sc;
  sc.n = spec.n;
  sc.p = spec.p;
  sc.k = spec.k;
  sc.truth_kind = spec.truth_kind;
  sc.sigma = spec.sigma;
  sc.perturbation_scale = spec.perturbation_scale;
  sc.seed = spec.seed;
  std::optional<SynthInstance> inst;
  std::string gen_error;
  try {
    inst = GenerateInstance(sc);
  } catch (const std::exception& e) {
    gen_error = std::string("error: ") + e.what();
  }

  for (Method m : methods) {
    TrialResult r = base(m);
    const auto start = std::chrono::steady_clock::now();
    if (!inst) {
      r.status = gen_error;
      out.push_back(r);
      continue;
    }
    try {
      const Dataset& d = inst->data;
      if (m == Method::kCe) {
        const CeFitResult fit = FitCe(d.X, d.y, inst->beta_tilde, ComputeEta(*d.w));
        r.status = ToString(fit.lp_status);
        if (fit.beta_hat) r.normalized_error = NormalizedError(*fit.beta_hat, inst->beta_star);
      } else {
        const LspaResult fit = FitLspa(d.X, d.y, inst->beta_tilde, spec.max_iter);
        r.status = fit.converged ? "converged" : "iteration_limit";
        r.normalized_error = NormalizedError(fit.beta_hat, inst->beta_star);
      }
      if (!std::isfinite(r.normalized_error)) {
        r.normalized_error = kSentinel;
        if (r.status == "optimal" || r.status == "converged") r.status = "nonfinite";
      }
    } catch (const std::exception& e) {
      r.status = std::string("error: ") + e.what();
      r.normalized_error = kSentinel;
    }
    r.wall_time = Seconds(start);
    out.push_back(r);
  }
  return out;
}

std::uint64_t CellSeed(std::uint64_t master, std::size_t n, std::size_t p, std::size_t k) {
  return DeriveSeed(DeriveSeed(DeriveSeed(master, n), p), k);
}

std::uint64_t TrialSeed(std::uint64_t cell_seed, std::size_t trial) {
  return DeriveSeed(cell_seed, trial);
}

double MedianError(std::span<const double> errors) {
  std::vector<double> finite;
  for (double e : errors) {
    if (std::isfinite(e)) finite.push_back(e);
  }
  const std::size_t sentinels = errors.size() - finite.size();
  if (finite.empty() || 2 * sentinels > errors.size()) return kSentinel;
  const auto mid = finite.begin() + static_cast<std::ptrdiff_t>((finite.size() - 1) / 2);
  std::nth_element(finite.begin(), mid, finite.end());
  return *mid;
}

GridResult RunGrid(const GridConfig& config, const ProgressFn& progress) {
  config.Validate();
  const std::vector<Cell> cells = EnumerateCells(config);
  const std::size_t t = config.trials;
  const std::size_t tasks = cells.size() * t;
  std::vector<std::vector<TrialResult>> slots(tasks);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  ParallelFor(
      tasks,
      [&](std::size_t task) {
        const Cell& c = cells[task / t];
        TrialSpec spec;
        spec.n = c.n;
        spec.p = c.p;
        spec.k = c.k;
        spec.sigma = c.sigma;
        spec.truth_kind = config.truth_kind;
        spec.seed = TrialSeed(CellSeed(config.master_seed, c.n, c.p, c.k), task % t);
        spec.perturbation_scale = config.perturbation_scale;
        spec.max_iter = config.max_iter;
        slots[task] = RunTrial(spec, config.methods);
        const std::size_t finished = ++done;
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mu);
          progress(finished, tasks);
        }
      },
      config.threads);

  GridResult result;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& c = cells[ci];
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      std::vector<double> errors;
      for (std::size_t tr = 0; tr < t; ++tr) {
        const TrialResult& r = slots[ci * t + tr][mi];
        errors.push_back(r.normalized_error);
        result.trials.push_back(r);
      }
      GridRow row;
      row.mode = config.mode;
      row.k = c.k;
      row.p = c.p;
      row.n = c.n;
      row.sigma = c.sigma;
      row.method = config.methods[mi];
      row.trials = t;
      row.median_error = MedianError(errors);
      row.finite_trials = static_cast<std::size_t>(
          std::count_if(errors.begin(), errors.end(), [](double e) { return std::isfinite(e); }));
      result.rows.push_back(row);
    }
  }
  return result;
}

void WriteGridCsv(std::ostream& out, std::span<const GridRow> rows) {
  out << "mode,k,p,n,sigma,method,trials,median_error,finite_trials\n";
  for (const GridRow& r : rows) {
    out << ToString(r.mode) << ',' << r.k << ',' << r.p << ',' << r.n << ','
        << FormatDouble(r.sigma) << ',' << ToString(r.method) << ',' << r.trials << ','
        << FormatDouble(r.median_error) << ',' << r.finite_trials << '\n';
  }
}

std::string GridCsv(std::span<const GridRow> rows) {
  std::ostringstream s;
  WriteGridCsv(s, rows);
  return s.str();
}

std::vector<GridRow> ReadGridCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("grid CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "mode,k,p,n,sigma,method,trials,median_error,finite_trials") {
    throw CsvError("grid CSV: unexpected header '" + line + "'");
  }
  std::vector<GridRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = SplitCsvLine(line);
    if (f.size() != 9) {
      throw CsvError("grid CSV line " + std::to_string(lineno) + ": expected 9 fields");
    }
    GridRow r;
    try {
      r.mode = ParseGridMode(f[0]);
      r.method = ParseMethod(f[5]);
    } catch (const std::invalid_argument& e) {
      throw CsvError("grid CSV line " + std::to_string(lineno) + ": " + e.what());
    }
    r.k = ParseSize(f[1]);
    r.p = ParseSize(f[2]);
    r.n = ParseSize(f[3]);
    r.sigma = ParseDouble(f[4]);
    r.trials = ParseSize(f[6]);
    r.median_error = ParseDouble(f[7]);
    r.finite_trials = ParseSize(f[8]);
    if (!(r.median_error >= 0.0)) {
      throw CsvError("grid CSV line " + std::to_string(lineno) + ": negative or nan error");
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<GridRow> LoadGridCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  return ReadGridCsv(in);
}

void WriteTrialsCsv(std::ostream& out, std::span<const TrialResult> trials) {
  out << "n,p,k,sigma,method,seed,normalized_error,status,wall_time\n";
  for (const TrialResult& r : trials) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << r.n << ',' << r.p << ',' << r.k << ',' << FormatDouble(r.sigma) << ','
        << ToString(r.method) << ',' << r.seed << ',' << FormatDouble(r.normalized_error)
        << ',' << status << ',' << FormatDouble(r.wall_time) << '\n';
  }
}

double ColumnValue(const GridRow& row) {
  switch (row.mode) {
    case GridMode::kFixKVaryP: return static_cast<double>(row.p);
    case GridMode::kFixPVaryK: return static_cast<double>(row.k);
    case GridMode::kNoiseSweep: return row.sigma;
  }
  return 0.0;
}

std::vector<BoundaryPoint> PhaseBoundary(std::span<const GridRow> rows, Method method,
                                         double threshold) {
  std::map<double, std::vector<std::pair<std::size_t, double>>> columns;
  for (const GridRow& r : rows) {
    if (r.method == method) columns[ColumnValue(r)].emplace_back(r.n, r.median_error);
  }
  std::vector<BoundaryPoint> out;
  for (auto& [col, cells] : columns) {
    std::sort(cells.begin(), cells.end());
    BoundaryPoint bp{col, std::nullopt};
    for (std::size_t i = cells.size(); i-- > 0;) {
      if (!(cells[i].second < threshold)) break;
      bp.n = cells[i].first;
    }
    out.push_back(bp);
  }
  return out;
}

std::string HeatmapColor(double error) {
  if (!std::isfinite(error)) return std::string(kSentinelColor);
  const double t = (ClippedLog(error) - kLogMin) / (kLogMax - kLogMin);
  auto lerp = [t](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * t));
  };
  return Hex(lerp(68, 253), lerp(1, 231), lerp(84, 37));
}

std::string RenderHeatmap(std::span<const GridRow> rows, Method method, double threshold) {
  std::vector<GridRow> sel;
  for (const GridRow& r : rows) {
    if (r.method == method) sel.push_back(r);
  }
  if (sel.empty()) throw std::invalid_argument("RenderHeatmap: no rows for the method");
  const GridMode mode = sel.front().mode;
  std::set<double> cols_set;
  std::set<std::size_t> ns_set;
  for (const GridRow& r : sel) {
    cols_set.insert(ColumnValue(r));
    ns_set.insert(r.n);
  }
  const std::vector<double> cols(cols_set.begin(), cols_set.end());
  const std::vector<std::size_t> ns(ns_set.begin(), ns_set.end());
  auto col_index = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(cols.begin(), cols.end(), v) - cols.begin());
  };
  auto n_index = [&](std::size_t n) {
    return static_cast<std::size_t>(std::lower_bound(ns.begin(), ns.end(), n) - ns.begin());
  };

  const double cw = std::max(24.0, 480.0 / static_cast<double>(cols.size()));
  const double ch = std::max(14.0, 360.0 / static_cast<double>(ns.size()));
  const double left = 80, top = 40;
  const double plot_w = cw * static_cast<double>(cols.size());
  const double plot_h = ch * static_cast<double>(ns.size());
  const double bar_x = left + plot_w + 30, bar_w = 16;
  const double width = bar_x + bar_w + 70, height = top + plot_h + 60;
  // Row 0 (smallest n) at the bottom.
  auto cell_y = [&](std::size_t ni) {
    return top + plot_h - ch * static_cast<double>(ni + 1);
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Num(width) << "\" height=\""
    << Num(height) << "\" viewBox=\"0 0 " << Num(width) << ' ' << Num(height)
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
    << "<stop offset=\"0\" stop-color=\"" << HeatmapColor(1e-6) << "\"/>"
    << "<stop offset=\"1\" stop-color=\"" << HeatmapColor(10.0) << "\"/>"
    << "</linearGradient></defs>\n";
  s << "<text x=\"" << Num(left) << "\" y=\"20\" font-size=\"13\">log10 median error ("
    << ToString(method) << ", " << ToString(mode) << ")</text>\n";

  for (const GridRow& r : sel) {
    const double x = left + cw * static_cast<double>(col_index(ColumnValue(r)));
    const double y = cell_y(n_index(r.n));
    s << "<rect class=\"cell\" x=\"" << Num(x) << "\" y=\"" << Num(y) << "\" width=\""
      << Num(cw) << "\" height=\"" << Num(ch) << "\" fill=\"" << HeatmapColor(r.median_error)
      << "\"><title>n=" << r.n << ' ' << AxisLabel(mode) << '=' << FormatDouble(ColumnValue(r))
      << " median=" << FormatDouble(r.median_error) << "</title></rect>\n";
  }

  // Axes.
  s << "<path class=\"axis\" d=\"M" << Num(left) << ' ' << Num(top) << " V"
    << Num(top + plot_h) << " H" << Num(left + plot_w) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (std::size_t ci = 0; ci < cols.size(); ++ci) {
    s << "<text x=\"" << Num(left + cw * (static_cast<double>(ci) + 0.5)) << "\" y=\""
      << Num(top + plot_h + 16) << "\" text-anchor=\"middle\">" << FormatDouble(cols[ci])
      << "</text>\n";
  }
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    s << "<text x=\"" << Num(left - 6) << "\" y=\"" << Num(cell_y(ni) + ch / 2 + 4)
      << "\" text-anchor=\"end\">" << ns[ni] << "</text>\n";
  }
  s << "<text x=\"" << Num(left + plot_w / 2) << "\" y=\"" << Num(top + plot_h + 40)
    << "\" text-anchor=\"middle\">" << AxisLabel(mode) << "</text>\n";
  s << "<text x=\"20\" y=\"" << Num(top + plot_h / 2) << "\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 20 " << Num(top + plot_h / 2) << ")\">n</text>\n";

  // Boundary: lower edge of the first qualifying cell in each column.
  std::vector<std::pair<double, double>> pts;
  for (const BoundaryPoint& bp : PhaseBoundary(sel, method, threshold)) {
    if (!bp.n) continue;
    pts.emplace_back(left + cw * (static_cast<double>(col_index(bp.column)) + 0.5),
                     cell_y(n_index(*bp.n)) + ch);
  }
  if (!pts.empty()) {
    s << "<polyline class=\"boundary\" fill=\"none\" stroke=\"#00c000\" stroke-width=\"2.5\" "
      << "points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      s << (i ? " " : "") << Num(pts[i].first) << ',' << Num(pts[i].second);
    }
    s << "\"/>\n";
    for (const auto& [x, y] : pts) {
      s << "<circle cx=\"" << Num(x) << "\" cy=\"" << Num(y) << "\" r=\"3\" fill=\"#00c000\"/>\n";
    }
  }

  // Colour bar.
  s << "<polygon class=\"colorbar\" points=\"" << Num(bar_x) << ',' << Num(top) << ' '
    << Num(bar_x + bar_w) << ',' << Num(top) << ' ' << Num(bar_x + bar_w) << ','
    << Num(top + plot_h) << ' ' << Num(bar_x) << ',' << Num(top + plot_h)
    << "\" fill=\"url(#ramp)\" stroke=\"black\"/>\n";
  for (int v = static_cast<int>(kLogMin); v <= static_cast<int>(kLogMax); ++v) {
    const double y = top + plot_h * (kLogMax - v) / (kLogMax - kLogMin);
    s << "<text x=\"" << Num(bar_x + bar_w + 4) << "\" y=\"" << Num(y + 4) << "\">" << v
      << "</text>\n";
  }
  s << "<text x=\"" << Num(bar_x) << "\" y=\"" << Num(top + plot_h + 16) << "\" fill=\""
    << kSentinelColor << "\">grey: failed</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string RenderNoiseSweep(std::span<const GridRow> rows) {
  if (rows.empty()) throw std::invalid_argument("RenderNoiseSweep: no rows");
  std::map<double, std::map<Method, std::vector<std::pair<std::size_t, double>>>> panels;
  std::size_t n_min = std::numeric_limits<std::size_t>::max(), n_max = 0;
  for (const GridRow& r : rows) {
    panels[r.sigma][r.method].emplace_back(r.n, r.median_error);
    n_min = std::min(n_min, r.n);
    n_max = std::max(n_max, r.n);
  }
  const std::size_t per_row = std::min<std::size_t>(3, panels.size());
  const std::size_t panel_rows = (panels.size() + per_row - 1) / per_row;
  const double pw = 260, ph = 180, gap_x = 70, gap_y = 70, left = 60, top = 50;
  const double width = left + per_row * (pw + gap_x);
  const double height = top + panel_rows * (ph + gap_y) + 20;
  auto xpos = [&](std::size_t n) {
    if (n_max == n_min) return pw / 2;
    return pw * static_cast<double>(n - n_min) / static_cast<double>(n_max - n_min);
  };
  auto ypos = [&](double e) { return ph * (kLogMax - ClippedLog(e)) / (kLogMax - kLogMin); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Num(width) << "\" height=\""
    << Num(height) << "\" viewBox=\"0 0 " << Num(width) << ' ' << Num(height)
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"" << Num(left) << "\" y=\"20\" font-size=\"13\">log10 median error vs n "
    << "(solid: ce, dotted: lspa)</text>\n";
  std::size_t idx = 0;
  for (const auto& [sigma, methods] : panels) {
    const double ox = left + static_cast<double>(idx % per_row) * (pw + gap_x);
    const double oy = top + static_cast<double>(idx / per_row) * (ph + gap_y);
    ++idx;
    s << "<g class=\"panel\" transform=\"translate(" << Num(ox) << ' ' << Num(oy) << ")\">\n";
    s << "<text x=\"" << Num(pw / 2) << "\" y=\"-8\" text-anchor=\"middle\">sigma = "
      << FormatDouble(sigma) << "</text>\n";
    s << "<path class=\"axis\" d=\"M0 0 V" << Num(ph) << " H" << Num(pw)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int v = static_cast<int>(kLogMin); v <= static_cast<int>(kLogMax); v += 1) {
      const double y = ph * (kLogMax - v) / (kLogMax - kLogMin);
      s << "<text x=\"-6\" y=\"" << Num(y + 4) << "\" text-anchor=\"end\">" << v << "</text>\n";
    }
    s << "<text x=\"0\" y=\"" << Num(ph + 16) << "\">" << n_min << "</text>\n";
    s << "<text x=\"" << Num(pw) << "\" y=\"" << Num(ph + 16) << "\" text-anchor=\"end\">"
      << n_max << "</text>\n";
    s << "<text x=\"" << Num(pw / 2) << "\" y=\"" << Num(ph + 32)
      << "\" text-anchor=\"middle\">n</text>\n";
    for (auto [method, pts] : methods) {
      std::sort(pts.begin(), pts.end());
      const bool ce = method == Method::kCe;
      const std::string style = ce ? "stroke=\"#1f4e9c\"" : "stroke=\"#c0392b\" stroke-dasharray=\"2,3\"";
      // Sentinel medians break the line.
      std::vector<std::vector<std::pair<double, double>>> segments(1);
      for (const auto& [n, e] : pts) {
        if (!std::isfinite(e)) {
          if (!segments.back().empty()) segments.emplace_back();
          continue;
        }
        segments.back().emplace_back(xpos(n), ypos(e));
      }
      for (const auto& seg : segments) {
        if (seg.empty()) continue;
        s << "<polyline class=\"" << ToString(method) << "\" fill=\"none\" stroke-width=\"1.8\" "
          << style << " points=\"";
        for (std::size_t i = 0; i < seg.size(); ++i) {
          s << (i ? " " : "") << Num(seg[i].first) << ',' << Num(seg[i].second);
        }
        s << "\"/>\n";
      }
    }
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace maxlin
