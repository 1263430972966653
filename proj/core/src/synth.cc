#include "maxlin/synth.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "maxlin/rng.h"

namespace maxlin {

std::string_view ToString(TruthKind kind) {
  return kind == TruthKind::kStandardBasis ? "basis" : "gaussian";
}

TruthKind ParseTruthKind(std::string_view s) {
  if (s == "basis" || s == "standard_basis") return TruthKind::kStandardBasis;
  if (s == "gaussian") return TruthKind::kGaussian;
  throw std::invalid_argument("unknown truth kind '" + std::string(s) +
                              "' (expected basis or gaussian)");
}

double SynthConfig::EffectivePerturbationScale() const {
  if (perturbation_scale) return *perturbation_scale;
  return 1.0 / (1000.0 * static_cast<double>(k) * static_cast<double>(p));
}

void SynthConfig::Validate() const {
  if (n == 0 || p == 0 || k == 0) {
    throw std::invalid_argument("SynthConfig: n, p and k must be >= 1");
  }
  if (truth_kind == TruthKind::kStandardBasis && k > p) {
    throw std::invalid_argument("SynthConfig: basis truth needs k <= p (k=" +
                                std::to_string(k) + ", p=" + std::to_string(p) + ")");
  }
  if (!(sigma >= 0.0)) throw std::invalid_argument("SynthConfig: sigma must be >= 0");
  if (!(EffectivePerturbationScale() >= 0.0)) {
    throw std::invalid_argument("SynthConfig: perturbation scale must be >= 0");
  }
}

std::uint64_t StreamSeed(std::uint64_t master, SeedStream stream) {
  return master + static_cast<std::uint64_t>(stream);
}

DenseMatrix GenRegressors(const SynthConfig& config) {
  Rng rng(StreamSeed(config.seed, SeedStream::kRegressors));
  DenseMatrix x(config.n, config.p);
  for (std::size_t i = 0; i < config.n; ++i)
    for (std::size_t j = 0; j < config.p; ++j) x(i, j) = rng.Normal();
  return x;
}

ParamBlocks GenGroundTruth(const SynthConfig& config) {
  config.Validate();
  ParamBlocks beta(config.k, config.p);
  if (config.truth_kind == TruthKind::kStandardBasis) {
    const double v = 1.0 / std::sqrt(static_cast<double>(config.k));
    for (std::size_t j = 0; j < config.k; ++j) beta.block(j)[j] = v;
    return beta;
  }
  Rng rng(StreamSeed(config.seed, SeedStream::kTruth));
  for (double& v : beta.flat()) v = rng.Normal();
  const double norm = Norm2(beta.flat());
  for (double& v : beta.flat()) v /= norm;
  return beta;
}

ParamBlocks PerturbInit(const ParamBlocks& beta_star, const SynthConfig& config) {
  const double sd = std::sqrt(config.EffectivePerturbationScale());
  ParamBlocks out = beta_star;
  if (sd == 0.0) return out;
  Rng rng(StreamSeed(config.seed, SeedStream::kPerturbation));
  for (double& v : out.flat()) v += sd * rng.Normal();
  return out;
}

Observations GenObservations(const DenseMatrix& x, const ParamBlocks& beta_star,
                             const SynthConfig& config) {
  if (x.cols() != beta_star.p()) {
    throw std::invalid_argument("GenObservations: regressor/parameter dimension mismatch");
  }
  Observations obs{std::vector<double>(x.rows()), std::vector<double>(x.rows(), 0.0)};
  if (config.sigma > 0.0) {
    Rng rng(StreamSeed(config.seed, SeedStream::kNoise));
    for (double& w : obs.w) w = config.sigma * rng.Normal();
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    obs.y[i] = EvalMaxLinear(x.row(i), beta_star).value + obs.w[i];
  }
  return obs;
}

double ComputeEta(std::span<const double> w) {
  if (w.empty()) return 0.0;
  double s = 0.0;
  for (double v : w) s += v < 0.0 ? -v : 0.0;
  return s / static_cast<double>(w.size());
}

SynthInstance GenerateInstance(const SynthConfig& config) {
  config.Validate();
  DenseMatrix x = GenRegressors(config);
  ParamBlocks star = GenGroundTruth(config);
  ParamBlocks tilde = PerturbInit(star, config);
  Observations obs = GenObservations(x, star, config);
  return SynthInstance{Dataset{std::move(x), std::move(obs.y), std::move(obs.w)},
                       std::move(star), std::move(tilde)};
}

}  // namespace maxlin
