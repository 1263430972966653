#ifndef MAXLIN_SYNTH_H_
#define MAXLIN_SYNTH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maxlin/linalg.h"
#include "maxlin/model.h"

namespace maxlin {

enum class TruthKind { kStandardBasis, kGaussian };

std::string_view ToString(TruthKind kind);
// Accepts "basis", "standard_basis" and "gaussian".
TruthKind ParseTruthKind(std::string_view s);

struct SynthConfig {
  std::size_t n = 100;
  std::size_t p = 10;
  std::size_t k = 5;
  TruthKind truth_kind = TruthKind::kStandardBasis;
  double sigma = 0.0;
  // Variance of each entry of the initialization perturbation. Unset means
  // 1 / (1000 k p).
  std::optional<double> perturbation_scale;
  std::uint64_t seed = 0;

  double EffectivePerturbationScale() const;
  // Throws std::invalid_argument when the invariants do not hold.
  void Validate() const;
};

// Independent streams are taken at fixed offsets from the master seed, so
// for example changing sigma leaves X and the truth untouched.
enum class SeedStream : std::uint64_t {
  kRegressors = 1,
  kTruth = 2,
  kNoise = 3,
  kPerturbation = 4,
};
std::uint64_t StreamSeed(std::uint64_t master, SeedStream stream);

// n x p matrix of i.i.d. standard normals.
DenseMatrix GenRegressors(const SynthConfig& config);

// Unit l2-norm ground truth: e_j / sqrt(k) per block, or normalized Gaussian.
// Throws std::invalid_argument for a basis truth with k > p.
ParamBlocks GenGroundTruth(const SynthConfig& config);

// beta_star + eps with eps ~ Normal(0, scale I).
ParamBlocks PerturbInit(const ParamBlocks& beta_star, const SynthConfig& config);

struct Observations {
  std::vector<double> y;
  std::vector<double> w;
};

// y_i = f_i(beta_star) + w_i with w_i ~ Normal(0, sigma^2).
Observations GenObservations(const DenseMatrix& x, const ParamBlocks& beta_star,
                             const SynthConfig& config);

// (1/n) sum_i (-w_i)_+.
double ComputeEta(std::span<const double> w);

struct SynthInstance {
  Dataset data;  // carries w
  ParamBlocks beta_star;
  ParamBlocks beta_tilde;
};

SynthInstance GenerateInstance(const SynthConfig& config);

}  // namespace maxlin

#endif  // MAXLIN_SYNTH_H_
