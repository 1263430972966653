#ifndef MAXLIN_THEORY_H_
#define MAXLIN_THEORY_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "maxlin/linalg.h"
#include "maxlin/model.h"

namespace maxlin {

// sqrt(pi / 32), the constant of the Gaussian small-ball lower bound.
double SmallBallConstant();

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo samples are drawn in fixed-size chunks, each from its own
// stream DeriveSeed(seed, chunk), so estimates do not depend on the thread
// count.
inline constexpr std::size_t kMonteCarloChunk = 1 << 16;

// P{g in C_j} for g ~ Normal(0, I_p), with C_j the cone of component j.
MonteCarloEstimate McConeProbability(const ParamBlocks& beta, std::size_t j,
                                     std::size_t samples, std::uint64_t seed);
// All k cones from one set of draws.
std::vector<MonteCarloEstimate> McConeProbabilities(const ParamBlocks& beta,
                                                    std::size_t samples,
                                                    std::uint64_t seed);

// P{g in C_j (under beta_star) xor g in C~_j (under beta_tilde)}.
MonteCarloEstimate McSymdiffProbability(const ParamBlocks& beta_star,
                                        const ParamBlocks& beta_tilde, std::size_t j,
                                        std::size_t samples, std::uint64_t seed);
std::vector<MonteCarloEstimate> McSymdiffProbabilities(const ParamBlocks& beta_star,
                                                       const ParamBlocks& beta_tilde,
                                                       std::size_t samples,
                                                       std::uint64_t seed);

// zeta = min_j sqrt(pi/32) P^2{C_j} - 2 max_j sqrt(P{C~_j xor C_j}), plug-in
// estimate from one set of draws; std_error by the delta method at the
// minimizing/maximizing cones.
MonteCarloEstimate Zeta(const ParamBlocks& beta_star, const ParamBlocks& beta_tilde,
                        std::size_t samples, std::uint64_t seed);

struct Lemma3Bounds {
  double inf_lower = 0.0;        // sqrt(pi/32) P^2
  double sup_upper = 0.0;        // sqrt(P), the bound as stated
  double sup_upper_tight = 0.0;  // sqrt(P / 2), what Cauchy-Schwarz gives
};

// Bounds on inf_w E 1_A(g)|<g,w>| and sup_w E 1_A(g)<g,w>_+ for a set of
// Gaussian measure `prob`. Throws std::invalid_argument outside [0, 1].
Lemma3Bounds Lemma3(double prob);

// Exact values for a planar polyhedral cone of angular width theta in [0, pi]:
// inf_w E 1_C(g)|<g,w>| = sqrt(2/pi) sin^2(theta/4) and
// sup_w E 1_C(g)<g,w>_+ = sin(theta/2) / sqrt(2 pi).
double Cone2dInfExpectation(double theta);
double Cone2dSupExpectation(double theta);

struct ConeMismatch2d {
  double tilde_minus_true = 0.0;  // width of C~_j \ C_j
  double true_minus_tilde = 0.0;  // width of C_j \ C~_j
};

struct Varrho2dResult {
  double value = 0.0;
  // min_j P{C_j} >= max_j P{C_j xor C~_j}, under which the closed form is exact.
  bool assumption_holds = false;
};

// Closed-form varrho for planar cones from their angular widths.
Varrho2dResult Varrho2d(std::span<const double> widths,
                        std::span<const ConeMismatch2d> mismatch);

// ---------------------------------------------------------------------------
// Directional extrema of Gaussian moments over the sphere.

enum class DirectionalKind {
  kInfAbs,       // inf_w E 1_A(g) |<g,w>|
  kSupPositive,  // sup_w E 1_A(g) <g,w>_+
};

struct DirectionalExtremum {
  double value = 0.0;
  double std_error = 0.0;  // of the sample mean at the chosen direction
  std::vector<double> direction;
  std::size_t samples = 0;
};

// Estimates the extremum for several sets at once from shared draws. The
// membership callback writes one flag per set. Sampled extrema are biased:
// the reported inf is >= the true inf and the reported sup is <= the true sup,
// up to Monte Carlo error.
std::vector<DirectionalExtremum> EstimateDirectionalExtrema(
    std::size_t p, std::size_t num_sets,
    const std::function<void(std::span<const double>, std::span<char>)>& membership,
    std::span<const DirectionalKind> kinds,
    std::span<const std::vector<double>> directions, std::size_t samples,
    std::uint64_t seed);

// Candidate directions: an even angle grid of `count` points for p = 2,
// otherwise `count` uniform random unit vectors.
std::vector<std::vector<double>> SampleDirections(std::size_t p, std::size_t count,
                                                  std::uint64_t seed);

// Boundary rays of each cone for p = 2; facet normals +-(b_j - b_l) otherwise.
std::vector<std::vector<double>> GeneratorDirections(const ParamBlocks& beta);

struct VarrhoEstimate {
  MonteCarloEstimate estimate;
  DirectionalExtremum inf_term;              // min_j inf_w over C_j
  DirectionalExtremum sup_tilde_minus_true;  // max_j sup_w over C~_j \ C_j
  DirectionalExtremum sup_true_minus_tilde;  // max_j sup_w over C_j \ C~_j
  std::size_t directions = 0;
};

// Approximates varrho = inf - sup - sup by searching `num_directions`
// sampled directions plus the cones' generator directions. The result is an
// upper estimate of varrho up to Monte Carlo error.
VarrhoEstimate VarrhoMc(const ParamBlocks& beta_star, const ParamBlocks& beta_tilde,
                        std::size_t gaussian_samples, std::size_t num_directions,
                        std::uint64_t seed);

// V_z = (1/n) sum_i sum_j 1_{C_j}(x_i) |<x_i, z_j>|.
double EmpiricalV(const DenseMatrix& x, const ParamBlocks& beta_star,
                  const ParamBlocks& z);
// Q_z = (1/n) sum_i sum_j (1_{C~_j}(x_i) - 1_{C_j}(x_i)) <x_i, z_j>.
double EmpiricalQ(const DenseMatrix& x, const ParamBlocks& beta_star,
                  const ParamBlocks& beta_tilde, const ParamBlocks& z);

// ceil(c zeta^-2 (4 p L_p^3 L_k^5 + 4 log(1/delta) L_k)) with natural logs
// floored at one: L_x = max(log x, 1). Throws for zeta <= 0, c <= 0 or
// delta outside (0, 1).
std::uint64_t SampleComplexityThreshold(std::size_t p, std::size_t k, double delta,
                                        double zeta, double c);

// (2 / (zeta n)) sum_i |w_i|. Throws for zeta <= 0 or empty w.
double ErrorBoundRhs(double zeta, std::span<const double> w);

struct TheoryOptions {
  std::size_t samples = 1'000'000;
  std::size_t directions = 10'000;
  std::uint64_t seed = 1;
  double delta = 0.05;
  double c = 1.0;
  bool compute_varrho = false;
};

struct ConeTheory {
  MonteCarloEstimate probability;
  MonteCarloEstimate symdiff;
  Lemma3Bounds bounds;  // evaluated at the estimated probability
};

struct TheoryReport {
  std::vector<ConeTheory> cones;
  double pi_min = 0.0;
  MonteCarloEstimate zeta;
  std::optional<VarrhoEstimate> varrho;
  // Present when zeta > 0.
  std::optional<std::uint64_t> sample_complexity;
  TheoryOptions options;
};

TheoryReport BuildTheoryReport(const ParamBlocks& beta_star,
                               const ParamBlocks& beta_tilde,
                               const TheoryOptions& options);

nlohmann::json ToJson(const TheoryReport& report);

}  // namespace maxlin

#endif  // MAXLIN_THEORY_H_
