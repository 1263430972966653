// maxlin: synthetic data, estimators, grids and diagnostics for max-linear
// regression.

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "maxlin/ce.h"
#include "maxlin/csv_io.h"
#include "maxlin/harness.h"
#include "maxlin/lp.h"
#include "maxlin/lspa.h"
#include "maxlin/synth.h"
#include "maxlin/theory.h"

namespace {

using maxlin::GridConfig;

nlohmann::json ParseJsonFile(const std::string& path) {
  try {
    return nlohmann::json::parse(maxlin::ReadFile(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

maxlin::SynthConfig SynthConfigFromJson(const nlohmann::json& j) {
  maxlin::SynthConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "n") c.n = value.get<std::size_t>();
    else if (key == "p") c.p = value.get<std::size_t>();
    else if (key == "k") c.k = value.get<std::size_t>();
    else if (key == "sigma") c.sigma = value.get<double>();
    else if (key == "truth") c.truth_kind = maxlin::ParseTruthKind(value.get<std::string>());
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "perturbation_scale") {
      if (!value.is_null()) c.perturbation_scale = value.get<double>();
    } else {
      throw std::invalid_argument("synth config: unknown key '" + key + "'");
    }
  }
  return c;
}

void WriteText(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
  } else {
    maxlin::WriteFile(path, text);
  }
}

struct GridFlags {
  std::string config;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out = "grid.csv";
  std::string trials_out;
  std::string svg;
  bool quiet = false;
};

void AddGridFlags(CLI::App* app, GridFlags& f) {
  app->add_option("--config", f.config, "Grid config JSON")->required()->check(CLI::ExistingFile);
  app->add_option("--trials", f.trials, "Override trials per cell");
  app->add_option("--seed", f.seed, "Override master seed");
  app->add_option("--threads", f.threads, "Override worker count (0 = all cores)");
  app->add_option("--out", f.out, "Grid CSV output (- for stdout)");
  app->add_option("--trials-out", f.trials_out, "Per-trial CSV output");
  app->add_option("--svg", f.svg, "SVG output");
  app->add_flag("--quiet", f.quiet, "No progress on stderr");
}

GridConfig LoadGrid(const GridFlags& f) {
  GridConfig c = maxlin::GridConfigFromJson(ParseJsonFile(f.config));
  if (f.trials) c.trials = *f.trials;
  if (f.seed) c.master_seed = *f.seed;
  if (f.threads) c.threads = *f.threads;
  c.Validate();
  return c;
}

maxlin::GridResult RunGridCommand(const GridFlags& f, const GridConfig& c) {
  maxlin::ProgressFn progress;
  if (!f.quiet) {
    progress = [](std::size_t done, std::size_t total) {
      if (done == total || done % 10 == 0) {
        std::cerr << "\rtrials " << done << "/" << total << std::flush;
        if (done == total) std::cerr << "\n";
      }
    };
  }
  maxlin::GridResult r = maxlin::RunGrid(c, progress);
  WriteText(f.out, maxlin::GridCsv(r.rows));
  if (!f.trials_out.empty()) {
    std::ostringstream s;
    maxlin::WriteTrialsCsv(s, r.trials);
    WriteText(f.trials_out, s.str());
  }
  return r;
}

void PrintBoundary(const std::vector<maxlin::GridRow>& rows, maxlin::Method method,
                   double threshold, maxlin::GridMode mode) {
  const char* axis = mode == maxlin::GridMode::kFixKVaryP ? "p" : "k";
  for (const auto& bp : maxlin::PhaseBoundary(rows, method, threshold)) {
    std::cout << axis << '=' << maxlin::FormatDouble(bp.column) << " boundary_n="
              << (bp.n ? std::to_string(*bp.n) : std::string("none")) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-linear regression: anchored convex estimator, LSPA baseline, grids"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic instance");
  std::string synth_config;
  maxlin::SynthConfig sc;
  std::string truth_name = "basis";
  std::optional<double> synth_pert;
  std::string synth_dir = ".";
  synth->add_option("--config", synth_config, "Synth config JSON (flags override it)")
      ->check(CLI::ExistingFile);
  auto* o_n = synth->add_option("--n", sc.n, "Samples");
  auto* o_p = synth->add_option("--p", sc.p, "Dimension");
  auto* o_k = synth->add_option("--k", sc.k, "Components");
  auto* o_sigma = synth->add_option("--sigma", sc.sigma, "Noise standard deviation");
  auto* o_truth = synth->add_option("--truth", truth_name, "basis or gaussian");
  auto* o_seed = synth->add_option("--seed", sc.seed, "Master seed");
  synth->add_option("--perturbation-scale", synth_pert, "Initialization perturbation variance");
  synth->add_option("--out-dir", synth_dir, "Directory for data.csv, truth.csv, init.csv");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit CE or LSPA to a dataset");
  std::string fit_method = "ce", fit_data, fit_init, fit_eta = "noise", fit_out = "beta.csv";
  std::string fit_diag, fit_truth, fit_dump_lp, fit_route = "dual";
  std::size_t fit_max_iter = 200;
  fit->add_option("--method", fit_method, "ce or lspa")->check(CLI::IsMember({"ce", "lspa"}));
  fit->add_option("--data", fit_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--init", fit_init, "Initialization CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--eta", fit_eta, "Residual budget, or 'noise' to use the w column");
  fit->add_option("--max-iter", fit_max_iter, "LSPA iteration cap");
  fit->add_option("--out", fit_out, "Estimate CSV");
  fit->add_option("--diag", fit_diag, "Diagnostics JSON");
  fit->add_option("--truth", fit_truth, "Ground truth CSV, for the normalized error")
      ->check(CLI::ExistingFile);
  fit->add_option("--dump-lp", fit_dump_lp, "Write the assembled LP in text form");
  fit->add_option("--route", fit_route, "LP route: dual or primal")
      ->check(CLI::IsMember({"dual", "primal"}));

  // phase
  auto* phase = app.add_subcommand("phase", "Run a phase-transition grid");
  GridFlags phase_flags;
  AddGridFlags(phase, phase_flags);
  double phase_threshold = 1e-5;
  phase->add_option("--threshold", phase_threshold, "Recovery threshold");

  // noise-sweep
  auto* sweep = app.add_subcommand("noise-sweep", "Run a noise sweep");
  GridFlags sweep_flags;
  AddGridFlags(sweep, sweep_flags);

  // theory
  auto* theory = app.add_subcommand("theory", "Monte Carlo margin diagnostics");
  std::string th_truth, th_init, th_out = "-";
  maxlin::TheoryOptions th_opt;
  theory->add_option("--truth", th_truth, "Ground truth CSV")->required()->check(CLI::ExistingFile);
  theory->add_option("--init", th_init, "Initialization CSV")->required()->check(CLI::ExistingFile);
  theory->add_option("--samples", th_opt.samples, "Gaussian draws");
  theory->add_option("--seed", th_opt.seed, "Monte Carlo seed");
  theory->add_option("--delta", th_opt.delta, "Failure probability for the sample threshold");
  theory->add_option("--c", th_opt.c, "Constant of the sample threshold");
  theory->add_option("--directions", th_opt.directions, "Sampled directions for varrho");
  theory->add_flag("--varrho", th_opt.compute_varrho, "Also estimate varrho");
  theory->add_option("--out", th_out, "Report JSON (- for stdout)");

  // render
  auto* render = app.add_subcommand("render", "Render a grid CSV as SVG");
  std::string rd_grid, rd_out = "grid.svg", rd_method = "ce";
  double rd_threshold = 1e-5;
  render->add_option("--grid", rd_grid, "Grid CSV")->required()->check(CLI::ExistingFile);
  render->add_option("--out", rd_out, "SVG output (- for stdout)");
  render->add_option("--method", rd_method, "Method for heatmaps")
      ->check(CLI::IsMember({"ce", "lspa"}));
  render->add_option("--threshold", rd_threshold, "Recovery threshold for the boundary");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      maxlin::SynthConfig c;
      if (!synth_config.empty()) c = SynthConfigFromJson(ParseJsonFile(synth_config));
      if (o_n->count()) c.n = sc.n;
      if (o_p->count()) c.p = sc.p;
      if (o_k->count()) c.k = sc.k;
      if (o_sigma->count()) c.sigma = sc.sigma;
      if (o_truth->count()) c.truth_kind = maxlin::ParseTruthKind(truth_name);
      if (o_seed->count()) c.seed = sc.seed;
      if (synth_pert) c.perturbation_scale = synth_pert;
      const maxlin::SynthInstance inst = maxlin::GenerateInstance(c);
      const std::filesystem::path dir(synth_dir);
      std::filesystem::create_directories(dir);
      maxlin::SaveDataset(dir / "data.csv", inst.data);
      maxlin::SaveParamBlocks(dir / "truth.csv", inst.beta_star);
      maxlin::SaveParamBlocks(dir / "init.csv", inst.beta_tilde);
      std::cout << "eta " << maxlin::FormatDouble(maxlin::ComputeEta(*inst.data.w)) << '\n';
    } else if (fit->parsed()) {
      const maxlin::Dataset data = maxlin::LoadDataset(fit_data);
      const maxlin::ParamBlocks init = maxlin::LoadParamBlocks(fit_init);
      if (init.p() != data.p()) throw std::invalid_argument("fit: init dimension != data dimension");
      nlohmann::json diag = {{"method", fit_method}};
      const auto start = std::chrono::steady_clock::now();
      std::optional<maxlin::ParamBlocks> beta;
      if (fit_method == "ce") {
        double eta;
        if (fit_eta == "noise") {
          if (!data.w) throw std::invalid_argument("fit: --eta noise needs a w column");
          eta = maxlin::ComputeEta(*data.w);
        } else {
          eta = maxlin::ParseDouble(fit_eta);
        }
        if (!fit_dump_lp.empty()) {
          const auto theta = maxlin::BuildAnchor(data.X, init);
          std::ostringstream s;
          maxlin::WriteLpText(s, maxlin::AssembleLp(data.X, data.y, theta, eta));
          WriteText(fit_dump_lp, s.str());
        }
        maxlin::CeOptions opt;
        opt.route = fit_route == "dual" ? maxlin::LpRoute::kDual : maxlin::LpRoute::kPrimal;
        const maxlin::CeFitResult r = maxlin::FitCe(data.X, data.y, init, eta, opt);
        diag["status"] = maxlin::ToString(r.lp_status);
        diag["eta"] = eta;
        diag["objective"] = r.objective;
        diag["residual_budget_used"] = r.residual_budget_used;
        diag["iterations"] = r.solve_iterations;
        beta = r.beta_hat;
      } else {
        const maxlin::LspaResult r = maxlin::FitLspa(data.X, data.y, init, fit_max_iter);
        diag["status"] = r.converged ? "converged" : "iteration_limit";
        diag["iterations"] = r.iterations_run;
        beta = r.beta_hat;
      }
      diag["wall_time"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (beta) {
        maxlin::SaveParamBlocks(fit_out, *beta);
        if (!fit_truth.empty()) {
          diag["normalized_error"] =
              maxlin::NormalizedError(*beta, maxlin::LoadParamBlocks(fit_truth));
        }
      }
      if (!fit_diag.empty()) WriteText(fit_diag, diag.dump(2) + "\n");
      std::cout << "status " << diag["status"].get<std::string>() << '\n';
      if (!beta) return 2;
    } else if (phase->parsed()) {
      const GridConfig c = LoadGrid(phase_flags);
      if (c.mode == maxlin::GridMode::kNoiseSweep) {
        throw std::invalid_argument("phase: use noise-sweep for mode noise_sweep");
      }
      const maxlin::GridResult r = RunGridCommand(phase_flags, c);
      for (maxlin::Method m : c.methods) {
        if (!phase_flags.svg.empty()) {
          std::string path = phase_flags.svg;
          if (c.methods.size() > 1) {
            const std::filesystem::path pth(path);
            path = (pth.parent_path() / (pth.stem().string() + "_" +
                                         std::string(maxlin::ToString(m)) +
                                         pth.extension().string())).string();
          }
          WriteText(path, maxlin::RenderHeatmap(r.rows, m, phase_threshold));
        }
        std::cout << "method " << maxlin::ToString(m) << '\n';
        PrintBoundary(r.rows, m, phase_threshold, c.mode);
      }
    } else if (sweep->parsed()) {
      const GridConfig c = LoadGrid(sweep_flags);
      if (c.mode != maxlin::GridMode::kNoiseSweep) {
        throw std::invalid_argument("noise-sweep: config mode must be noise_sweep");
      }
      const maxlin::GridResult r = RunGridCommand(sweep_flags, c);
      if (!sweep_flags.svg.empty()) WriteText(sweep_flags.svg, maxlin::RenderNoiseSweep(r.rows));
    } else if (theory->parsed()) {
      const maxlin::ParamBlocks truth = maxlin::LoadParamBlocks(th_truth);
      const maxlin::ParamBlocks init = maxlin::LoadParamBlocks(th_init);
      const maxlin::TheoryReport rep = maxlin::BuildTheoryReport(truth, init, th_opt);
      WriteText(th_out, maxlin::ToJson(rep).dump(2) + "\n");
    } else if (render->parsed()) {
      const auto rows = maxlin::LoadGridCsv(rd_grid);
      if (rows.empty()) throw std::invalid_argument("render: grid CSV has no rows");
      const std::string svg = rows.front().mode == maxlin::GridMode::kNoiseSweep
                                  ? maxlin::RenderNoiseSweep(rows)
                                  : maxlin::RenderHeatmap(rows, maxlin::ParseMethod(rd_method),
                                                          rd_threshold);
      WriteText(rd_out, svg);
    }
  } catch (const std::exception& e) {
    std::cerr << "maxlin: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
