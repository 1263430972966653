#include "maxlin/theory.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "maxlin/parallel.h"
#include "maxlin/rng.h"

namespace maxlin {

namespace {

std::size_t NumChunks(std::size_t samples) {
  return (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
}

std::size_t ChunkSize(std::size_t samples, std::size_t chunk) {
  return std::min(kMonteCarloChunk, samples - chunk * kMonteCarloChunk);
}

// Fills one accumulator per chunk in parallel batches and folds them into
// `total` strictly in chunk order.
template <typename Acc, typename Make, typename Fill, typename Merge>
void ChunkedReduce(std::size_t samples, Acc& total, Make make, Fill fill, Merge merge) {
  const std::size_t chunks = NumChunks(samples);
  const std::size_t batch = DefaultThreadCount();
  for (std::size_t start = 0; start < chunks; start += batch) {
    const std::size_t count = std::min(batch, chunks - start);
    std::vector<Acc> parts;
    parts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) parts.push_back(make());
    ParallelFor(count, [&](std::size_t i) { fill(start + i, parts[i]); });
    for (auto& part : parts) merge(total, part);
  }
}

void DrawGaussian(Rng& rng, std::span<double> g) {
  for (double& v : g) v = rng.Normal();
}

MonteCarloEstimate Proportion(std::size_t hits, std::size_t samples, std::uint64_t seed) {
  const double n = static_cast<double>(samples);
  const double phat = static_cast<double>(hits) / n;
  return {phat, std::sqrt(std::max(0.0, phat * (1.0 - phat)) / n), samples, seed};
}

void RequireSamples(std::size_t samples) {
  if (samples == 0) throw std::invalid_argument("Monte Carlo: samples must be >= 1");
}

void RequireSameShape(const ParamBlocks& a, const ParamBlocks& b) {
  if (a.k() != b.k() || a.p() != b.p()) {
    throw std::invalid_argument("theory: parameter shapes differ");
  }
}

struct ConeCounts {
  std::vector<std::size_t> cone;
  std::vector<std::size_t> symdiff;
};

// Cone and symmetric-difference counts from one set of draws.
ConeCounts CountCones(const ParamBlocks& star, const ParamBlocks* tilde,
                      std::size_t samples, std::uint64_t seed) {
  RequireSamples(samples);
  const std::size_t k = star.k(), p = star.p();
  ConeCounts total{std::vector<std::size_t>(k, 0), std::vector<std::size_t>(k, 0)};
  ChunkedReduce(
      samples, total, [&] { return ConeCounts{std::vector<std::size_t>(k, 0),
                                              std::vector<std::size_t>(k, 0)}; },
      [&](std::size_t chunk, ConeCounts& acc) {
        Rng rng(DeriveSeed(seed, chunk));
        std::vector<double> g(p);
        for (std::size_t s = 0, e = ChunkSize(samples, chunk); s < e; ++s) {
          DrawGaussian(rng, g);
          const std::size_t a = ConeIndex(g, star);
          ++acc.cone[a];
          if (tilde != nullptr) {
            const std::size_t b = ConeIndex(g, *tilde);
            if (a != b) {
              ++acc.symdiff[a];
              ++acc.symdiff[b];
            }
          }
        }
      },
      [&](ConeCounts& t, const ConeCounts& part) {
        for (std::size_t j = 0; j < k; ++j) {
          t.cone[j] += part.cone[j];
          t.symdiff[j] += part.symdiff[j];
        }
      });
  return total;
}

void CheckAngle(double theta, const char* what) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw std::invalid_argument(std::string(what) + ": angle must lie in [0, pi]");
  }
}

nlohmann::json EstimateJson(const MonteCarloEstimate& e) {
  return {{"value", e.value},
          {"std_error", e.std_error},
          {"samples", e.samples},
          {"seed", e.seed}};
}

nlohmann::json ExtremumJson(const DirectionalExtremum& e) {
  return {{"value", e.value},
          {"std_error", e.std_error},
          {"direction", e.direction},
          {"samples", e.samples}};
}

}  // namespace

double SmallBallConstant() { return std::sqrt(std::numbers::pi / 32.0); }

std::vector<MonteCarloEstimate> McConeProbabilities(const ParamBlocks& beta,
                                                    std::size_t samples,
                                                    std::uint64_t seed) {
  const ConeCounts c = CountCones(beta, nullptr, samples, seed);
  std::vector<MonteCarloEstimate> out;
  for (std::size_t hits : c.cone) out.push_back(Proportion(hits, samples, seed));
  return out;
}

MonteCarloEstimate McConeProbability(const ParamBlocks& beta, std::size_t j,
                                     std::size_t samples, std::uint64_t seed) {
  if (j >= beta.k()) throw std::invalid_argument("McConeProbability: bad cone index");
  return McConeProbabilities(beta, samples, seed)[j];
}

std::vector<MonteCarloEstimate> McSymdiffProbabilities(const ParamBlocks& beta_star,
                                                       const ParamBlocks& beta_tilde,
                                                       std::size_t samples,
                                                       std::uint64_t seed) {
  RequireSameShape(beta_star, beta_tilde);
  const ConeCounts c = CountCones(beta_star, &beta_tilde, samples, seed);
  std::vector<MonteCarloEstimate> out;
  for (std::size_t hits : c.symdiff) out.push_back(Proportion(hits, samples, seed));
  return out;
}

MonteCarloEstimate McSymdiffProbability(const ParamBlocks& beta_star,
                                        const ParamBlocks& beta_tilde, std::size_t j,
                                        std::size_t samples, std::uint64_t seed) {
  if (j >= beta_star.k()) {
    throw std::invalid_argument("McSymdiffProbability: bad cone index");
  }
  return McSymdiffProbabilities(beta_star, beta_tilde, samples, seed)[j];
}

MonteCarloEstimate Zeta(const ParamBlocks& beta_star, const ParamBlocks& beta_tilde,
                        std::size_t samples, std::uint64_t seed) {
  RequireSameShape(beta_star, beta_tilde);
  const ConeCounts c = CountCones(beta_star, &beta_tilde, samples, seed);
  const std::size_t jmin = static_cast<std::size_t>(
      std::min_element(c.cone.begin(), c.cone.end()) - c.cone.begin());
  const std::size_t jmax = static_cast<std::size_t>(
      std::max_element(c.symdiff.begin(), c.symdiff.end()) - c.symdiff.begin());
  const MonteCarloEstimate pmin = Proportion(c.cone[jmin], samples, seed);
  const MonteCarloEstimate smax = Proportion(c.symdiff[jmax], samples, seed);
  const double a = SmallBallConstant();
  const double value = a * pmin.value * pmin.value - 2.0 * std::sqrt(smax.value);
  const double d_first = 2.0 * a * pmin.value * pmin.std_error;
  // d/ds 2 sqrt(s) = 1/sqrt(s); at s = 0 the estimate has no spread.
  const double d_second = smax.value > 0.0 ? smax.std_error / std::sqrt(smax.value) : 0.0;
  return {value, std::hypot(d_first, d_second), samples, seed};
}

Lemma3Bounds Lemma3(double prob) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("Lemma3: probability must lie in [0, 1]");
  }
  return {SmallBallConstant() * prob * prob, std::sqrt(prob), std::sqrt(prob / 2.0)};
}

double Cone2dInfExpectation(double theta) {
  CheckAngle(theta, "Cone2dInfExpectation");
  const double s = std::sin(theta / 4.0);
  return std::sqrt(2.0 / std::numbers::pi) * s * s;
}

double Cone2dSupExpectation(double theta) {
  CheckAngle(theta, "Cone2dSupExpectation");
  return std::sin(theta / 2.0) / std::sqrt(2.0 * std::numbers::pi);
}

Varrho2dResult Varrho2d(std::span<const double> widths,
                        std::span<const ConeMismatch2d> mismatch) {
  if (widths.empty() || widths.size() != mismatch.size()) {
    throw std::invalid_argument("Varrho2d: need one mismatch pair per cone");
  }
  constexpr double pi = std::numbers::pi;
  double min_inf = std::numeric_limits<double>::infinity();
  double max_a = 0.0, max_b = 0.0;
  double min_width = std::numeric_limits<double>::infinity(), max_symdiff = 0.0;
  for (std::size_t j = 0; j < widths.size(); ++j) {
    CheckAngle(widths[j], "Varrho2d");
    CheckAngle(mismatch[j].tilde_minus_true, "Varrho2d");
    CheckAngle(mismatch[j].true_minus_tilde, "Varrho2d");
    const double s = std::sin(widths[j] / 4.0);
    min_inf = std::min(min_inf, (2.0 / pi) * s * s);
    max_a = std::max(max_a, std::sin(mismatch[j].tilde_minus_true / 2.0) / pi);
    max_b = std::max(max_b, std::sin(mismatch[j].true_minus_tilde / 2.0) / pi);
    min_width = std::min(min_width, widths[j]);
    max_symdiff = std::max(max_symdiff,
                           mismatch[j].tilde_minus_true + mismatch[j].true_minus_tilde);
  }
  // sqrt(2) Gamma(3/2) / Gamma(1) = sqrt(pi / 2).
  const double coeff = std::sqrt(pi / 2.0);
  return {coeff * (min_inf - max_a - max_b), min_width >= max_symdiff};
}

std::vector<DirectionalExtremum> EstimateDirectionalExtrema(
    std::size_t p, std::size_t num_sets,
    const std::function<void(std::span<const double>, std::span<char>)>& membership,
    std::span<const DirectionalKind> kinds,
    std::span<const std::vector<double>> directions, std::size_t samples,
    std::uint64_t seed) {
  RequireSamples(samples);
  if (kinds.size() != num_sets) {
    throw std::invalid_argument("EstimateDirectionalExtrema: one kind per set");
  }
  if (directions.empty()) {
    throw std::invalid_argument("EstimateDirectionalExtrema: no directions");
  }
  const std::size_t m = directions.size();
  std::vector<double> dirs(m * p);
  for (std::size_t d = 0; d < m; ++d) {
    if (directions[d].size() != p) {
      throw std::invalid_argument("EstimateDirectionalExtrema: direction length != p");
    }
    const double nrm = Norm2(directions[d]);
    if (nrm == 0.0) throw std::invalid_argument("EstimateDirectionalExtrema: zero direction");
    for (std::size_t c = 0; c < p; ++c) dirs[d * p + c] = directions[d][c] / nrm;
  }

  struct Moments {
    std::vector<double> sum, sumsq;
  };
  auto make = [&] {
    return Moments{std::vector<double>(num_sets * m, 0.0),
                   std::vector<double>(num_sets * m, 0.0)};
  };
  Moments total = make();
  ChunkedReduce(
      samples, total, make,
      [&](std::size_t chunk, Moments& acc) {
        Rng rng(DeriveSeed(seed, chunk));
        std::vector<double> g(p), dots(m);
        std::vector<char> flags(num_sets);
        for (std::size_t s = 0, e = ChunkSize(samples, chunk); s < e; ++s) {
          DrawGaussian(rng, g);
          std::fill(flags.begin(), flags.end(), 0);
          membership(g, flags);
          if (std::none_of(flags.begin(), flags.end(), [](char f) { return f != 0; })) {
            continue;
          }
          for (std::size_t d = 0; d < m; ++d) {
            const double* w = &dirs[d * p];
            double v = 0.0;
            for (std::size_t c = 0; c < p; ++c) v += g[c] * w[c];
            dots[d] = v;
          }
          for (std::size_t set = 0; set < num_sets; ++set) {
            if (!flags[set]) continue;
            double* sum = &acc.sum[set * m];
            double* sumsq = &acc.sumsq[set * m];
            if (kinds[set] == DirectionalKind::kInfAbs) {
              for (std::size_t d = 0; d < m; ++d) {
                const double v = std::abs(dots[d]);
                sum[d] += v;
                sumsq[d] += v * v;
              }
            } else {
              for (std::size_t d = 0; d < m; ++d) {
                const double v = dots[d] > 0.0 ? dots[d] : 0.0;
                sum[d] += v;
                sumsq[d] += v * v;
              }
            }
          }
        }
      },
      [&](Moments& t, const Moments& part) {
        for (std::size_t i = 0; i < t.sum.size(); ++i) {
          t.sum[i] += part.sum[i];
          t.sumsq[i] += part.sumsq[i];
        }
      });

  const double n = static_cast<double>(samples);
  std::vector<DirectionalExtremum> out(num_sets);
  for (std::size_t set = 0; set < num_sets; ++set) {
    const bool want_min = kinds[set] == DirectionalKind::kInfAbs;
    std::size_t best = 0;
    for (std::size_t d = 1; d < m; ++d) {
      const double v = total.sum[set * m + d], b = total.sum[set * m + best];
      if (want_min ? v < b : v > b) best = d;
    }
    const double mean = total.sum[set * m + best] / n;
    const double var = std::max(0.0, total.sumsq[set * m + best] / n - mean * mean);
    out[set].value = mean;
    out[set].std_error = std::sqrt(var / n);
    out[set].direction.assign(dirs.begin() + static_cast<std::ptrdiff_t>(best * p),
                              dirs.begin() + static_cast<std::ptrdiff_t>((best + 1) * p));
    out[set].samples = samples;
  }
  return out;
}

std::vector<std::vector<double>> SampleDirections(std::size_t p, std::size_t count,
                                                  std::uint64_t seed) {
  std::vector<std::vector<double>> out;
  out.reserve(count);
  if (p == 2) {
    for (std::size_t d = 0; d < count; ++d) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(d) /
                       static_cast<double>(count);
      out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
  }
  Rng rng(seed);
  while (out.size() < count) {
    std::vector<double> w(p);
    DrawGaussian(rng, w);
    const double nrm = Norm2(w);
    if (nrm == 0.0) continue;
    for (double& v : w) v /= nrm;
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::vector<double>> GeneratorDirections(const ParamBlocks& beta) {
  std::vector<std::vector<double>> out;
  const std::size_t p = beta.p();
  for (std::size_t j = 0; j < beta.k(); ++j) {
    for (std::size_t l = j + 1; l < beta.k(); ++l) {
      std::vector<double> d(p);
      for (std::size_t c = 0; c < p; ++c) d[c] = beta.block(j)[c] - beta.block(l)[c];
      const double nrm = Norm2(d);
      if (nrm == 0.0) continue;
      for (double& v : d) v /= nrm;
      if (p == 2) d = {-d[1], d[0]};
      std::vector<double> neg(p);
      for (std::size_t c = 0; c < p; ++c) neg[c] = -d[c];
      out.push_back(std::move(d));
      out.push_back(std::move(neg));
    }
  }
  return out;
}

VarrhoEstimate VarrhoMc(const ParamBlocks& beta_star, const ParamBlocks& beta_tilde,
                        std::size_t gaussian_samples, std::size_t num_directions,
                        std::uint64_t seed) {
  RequireSameShape(beta_star, beta_tilde);
  if (num_directions == 0) throw std::invalid_argument("VarrhoMc: need >= 1 direction");
  const std::size_t k = beta_star.k(), p = beta_star.p();
  auto dirs = SampleDirections(p, num_directions, DeriveSeed(seed, 0xD1EC7104ULL));
  for (const auto* b : {&beta_star, &beta_tilde}) {
    for (auto& g : GeneratorDirections(*b)) dirs.push_back(std::move(g));
  }
  // Sets: C_j, then C~_j \ C_j, then C_j \ C~_j.
  std::vector<DirectionalKind> kinds(3 * k, DirectionalKind::kSupPositive);
  std::fill(kinds.begin(), kinds.begin() + static_cast<std::ptrdiff_t>(k),
            DirectionalKind::kInfAbs);
  auto membership = [&](std::span<const double> g, std::span<char> flags) {
    const std::size_t a = ConeIndex(g, beta_star);
    const std::size_t b = ConeIndex(g, beta_tilde);
    flags[a] = 1;
    if (a != b) {
      flags[k + b] = 1;      // in C~_b, not in C_b
      flags[2 * k + a] = 1;  // in C_a, not in C~_a
    }
  };
  const auto ext = EstimateDirectionalExtrema(p, 3 * k, membership, kinds, dirs,
                                              gaussian_samples, seed);
  VarrhoEstimate est;
  est.directions = dirs.size();
  auto pick = [&](std::size_t offset, bool want_min) {
    std::size_t best = offset;
    for (std::size_t j = offset + 1; j < offset + k; ++j) {
      if (want_min ? ext[j].value < ext[best].value : ext[j].value > ext[best].value) {
        best = j;
      }
    }
    return ext[best];
  };
  est.inf_term = pick(0, true);
  est.sup_tilde_minus_true = pick(k, false);
  est.sup_true_minus_tilde = pick(2 * k, false);
  est.estimate.value = est.inf_term.value - est.sup_tilde_minus_true.value -
                       est.sup_true_minus_tilde.value;
  est.estimate.std_error = std::sqrt(
      est.inf_term.std_error * est.inf_term.std_error +
      est.sup_tilde_minus_true.std_error * est.sup_tilde_minus_true.std_error +
      est.sup_true_minus_tilde.std_error * est.sup_true_minus_tilde.std_error);
  est.estimate.samples = gaussian_samples;
  est.estimate.seed = seed;
  return est;
}

double EmpiricalV(const DenseMatrix& x, const ParamBlocks& beta_star,
                  const ParamBlocks& z) {
  RequireSameShape(beta_star, z);
  if (x.cols() != z.p() || x.rows() == 0) {
    throw std::invalid_argument("EmpiricalV: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const std::size_t j = ConeIndex(x.row(i), beta_star);
    s += std::abs(Dot(x.row(i), z.block(j)));
  }
  return s / static_cast<double>(x.rows());
}

double EmpiricalQ(const DenseMatrix& x, const ParamBlocks& beta_star,
                  const ParamBlocks& beta_tilde, const ParamBlocks& z) {
  RequireSameShape(beta_star, z);
  RequireSameShape(beta_tilde, z);
  if (x.cols() != z.p() || x.rows() == 0) {
    throw std::invalid_argument("EmpiricalQ: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const std::size_t a = ConeIndex(x.row(i), beta_star);
    const std::size_t b = ConeIndex(x.row(i), beta_tilde);
    if (a != b) s += Dot(x.row(i), z.block(b)) - Dot(x.row(i), z.block(a));
  }
  return s / static_cast<double>(x.rows());
}

std::uint64_t SampleComplexityThreshold(std::size_t p, std::size_t k, double delta,
                                        double zeta, double c) {
  if (!(zeta > 0.0)) throw std::invalid_argument("SampleComplexityThreshold: zeta <= 0");
  if (!(c > 0.0)) throw std::invalid_argument("SampleComplexityThreshold: c <= 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("SampleComplexityThreshold: delta outside (0, 1)");
  }
  if (p == 0 || k == 0) throw std::invalid_argument("SampleComplexityThreshold: p, k >= 1");
  const double lp = std::max(std::log(static_cast<double>(p)), 1.0);
  const double lk = std::max(std::log(static_cast<double>(k)), 1.0);
  const double bracket = 4.0 * static_cast<double>(p) * lp * lp * lp * std::pow(lk, 5) +
                         4.0 * std::log(1.0 / delta) * lk;
  const double value = std::ceil(c * bracket / (zeta * zeta));
  if (!(value < 1.8e19)) {
    throw std::overflow_error("SampleComplexityThreshold: threshold exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(value);
}

double ErrorBoundRhs(double zeta, std::span<const double> w) {
  if (!(zeta > 0.0)) throw std::invalid_argument("ErrorBoundRhs: zeta <= 0");
  if (w.empty()) throw std::invalid_argument("ErrorBoundRhs: empty noise vector");
  double s = 0.0;
  for (double v : w) s += std::abs(v);
  return 2.0 * s / (zeta * static_cast<double>(w.size()));
}

TheoryReport BuildTheoryReport(const ParamBlocks& beta_star,
                               const ParamBlocks& beta_tilde,
                               const TheoryOptions& options) {
  RequireSameShape(beta_star, beta_tilde);
  TheoryReport rep;
  rep.options = options;
  const ConeCounts counts =
      CountCones(beta_star, &beta_tilde, options.samples, options.seed);
  rep.pi_min = 1.0;
  for (std::size_t j = 0; j < beta_star.k(); ++j) {
    ConeTheory ct;
    ct.probability = Proportion(counts.cone[j], options.samples, options.seed);
    ct.symdiff = Proportion(counts.symdiff[j], options.samples, options.seed);
    ct.bounds = Lemma3(ct.probability.value);
    rep.pi_min = std::min(rep.pi_min, ct.probability.value);
    rep.cones.push_back(ct);
  }
  rep.zeta = Zeta(beta_star, beta_tilde, options.samples, options.seed);
  if (rep.zeta.value > 0.0) {
    rep.sample_complexity = SampleComplexityThreshold(beta_star.p(), beta_star.k(),
                                                      options.delta, rep.zeta.value,
                                                      options.c);
  }
  if (options.compute_varrho) {
    rep.varrho = VarrhoMc(beta_star, beta_tilde, options.samples, options.directions,
                          DeriveSeed(options.seed, 0x7A));
  }
  return rep;
}

nlohmann::json ToJson(const TheoryReport& report) {
  nlohmann::json cones = nlohmann::json::array();
  for (std::size_t j = 0; j < report.cones.size(); ++j) {
    const ConeTheory& c = report.cones[j];
    cones.push_back({{"component", j + 1},
                     {"probability", EstimateJson(c.probability)},
                     {"symdiff_probability", EstimateJson(c.symdiff)},
                     {"lemma3_inf_lower", c.bounds.inf_lower},
                     {"lemma3_sup_upper", c.bounds.sup_upper},
                     {"lemma3_sup_upper_tight", c.bounds.sup_upper_tight}});
  }
  nlohmann::json j = {
      {"cones", cones},
      {"pi_min", report.pi_min},
      {"zeta_hat", EstimateJson(report.zeta)},
      {"samples", report.options.samples},
      {"seed", report.options.seed},
      {"delta", report.options.delta},
      {"c", report.options.c},
  };
  j["sample_complexity_threshold"] = report.sample_complexity
                                         ? nlohmann::json(*report.sample_complexity)
                                         : nlohmann::json(nullptr);
  if (report.varrho) {
    const VarrhoEstimate& v = *report.varrho;
    j["varrho_hat"] = {{"estimate", EstimateJson(v.estimate)},
                       {"inf_term", ExtremumJson(v.inf_term)},
                       {"sup_tilde_minus_true", ExtremumJson(v.sup_tilde_minus_true)},
                       {"sup_true_minus_tilde", ExtremumJson(v.sup_true_minus_tilde)},
                       {"directions", v.directions},
                       {"approximation", true}};
  } else {
    j["varrho_hat"] = nullptr;
  }
  return j;
}

}  // namespace maxlin
