#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "maxlin/ce.h"
#include "maxlin/synth.h"

namespace maxlin {
namespace {

SynthConfig Config(std::size_t n, std::size_t p, std::size_t k, double sigma,
                   std::uint64_t seed) {
  SynthConfig c;
  c.n = n;
  c.p = p;
  c.k = k;
  c.sigma = sigma;
  c.seed = seed;
  return c;
}

// f_i(beta) - y_i stacked with t_i = (f_i - y_i)_+.
std::vector<double> TruthPoint(const SynthInstance& inst) {
  std::vector<double> x(inst.beta_star.flat().begin(), inst.beta_star.flat().end());
  for (std::size_t i = 0; i < inst.data.n(); ++i) {
    const double r = EvalMaxLinear(inst.data.X.row(i), inst.beta_star).value - inst.data.y[i];
    x.push_back(std::max(0.0, r));
  }
  return x;
}

TEST(BuildAnchorTest, SingleSample) {
  const DenseMatrix x = DenseMatrix::FromRows({{2, 1}});
  const ParamBlocks tilde = ParamBlocks::FromBlocks({{1, 0}, {0, 1}});
  const AnchorVector a = BuildAnchor(x, tilde);
  EXPECT_EQ(a.k, 2u);
  EXPECT_EQ(a.p, 2u);
  EXPECT_EQ(a.theta, (std::vector<double>{1, 0.5, 0, 0}));
}

TEST(BuildAnchorTest, SingleComponentIsHalfTheMeanRegressor) {
  const SynthInstance inst = GenerateInstance(Config(37, 4, 1, 0, 3));
  const AnchorVector a = BuildAnchor(inst.data.X, inst.beta_tilde);
  for (std::size_t c = 0; c < 4; ++c) {
    double s = 0;
    for (std::size_t i = 0; i < 37; ++i) s += inst.data.X(i, c);
    EXPECT_NEAR(a.theta[c], s / (2 * 37), 1e-15);
  }
}

TEST(BuildAnchorTest, BlocksSumToTheRegressorTotal) {
  const SynthInstance inst = GenerateInstance(Config(60, 3, 3, 0, 5));
  SynthConfig g = Config(60, 3, 3, 0, 5);
  g.k = 4;
  g.truth_kind = TruthKind::kGaussian;
  const SynthInstance ginst = GenerateInstance(g);
  for (const SynthInstance* s : {&inst, &ginst}) {
    const AnchorVector a = BuildAnchor(s->data.X, s->beta_tilde);
    for (std::size_t c = 0; c < 3; ++c) {
      double blocks = 0, rows = 0;
      for (std::size_t j = 0; j < a.k; ++j) blocks += a.theta[j * 3 + c];
      for (std::size_t i = 0; i < 60; ++i) rows += s->data.X(i, c);
      EXPECT_NEAR(2 * 60 * blocks, rows, 1e-12);
    }
  }
}

TEST(AssembleLpTest, Shape) {
  const SynthInstance inst = GenerateInstance(Config(2, 3, 2, 0, 1));
  const AnchorVector a = BuildAnchor(inst.data.X, inst.beta_tilde);
  const LpProblem lp = AssembleLp(inst.data.X, inst.data.y, a, 0.0);
  EXPECT_EQ(lp.num_vars, 8u);
  EXPECT_EQ(lp.constraints.size(), 5u);
  for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(lp.bounds[j].lower, -kInf);
  for (std::size_t j = 6; j < 8; ++j) EXPECT_EQ(lp.bounds[j].lower, 0.0);
  EXPECT_THROW(AssembleLp(inst.data.X, inst.data.y, a, -1e-3), std::invalid_argument);
}

TEST(AssembleLpTest, TruthIsFeasibleAtTheNoiseBudget) {
  for (double sigma : {0.0, 0.1, 0.5}) {
    const SynthInstance inst = GenerateInstance(Config(40, 3, 3, sigma, 9));
    const double eta = ComputeEta(*inst.data.w);
    EXPECT_NEAR(eta, PositiveResidualObjective(inst.beta_star, inst.data), 1e-14);
    const AnchorVector a = BuildAnchor(inst.data.X, inst.beta_tilde);
    const LpProblem lp = AssembleLp(inst.data.X, inst.data.y, a, eta);
    EXPECT_TRUE(VerifySolution(lp, TruthPoint(inst)).feasible) << "sigma " << sigma;
  }
}

TEST(FitCeTest, SingleComponentRecovery) {
  const SynthInstance inst = GenerateInstance(Config(50, 3, 1, 0, 4));
  const CeFitResult r = FitCe(inst.data.X, inst.data.y, inst.beta_tilde, 0.0);
  ASSERT_EQ(r.lp_status, LpStatus::kOptimal);
  EXPECT_LT(Norm12(Difference(*r.beta_hat, inst.beta_star)), 1e-6);
}

TEST(FitCeTest, NoiselessRecovery) {
  const SynthInstance inst = GenerateInstance(Config(500, 5, 3, 0, 6));
  const CeFitResult r = FitCe(inst.data.X, inst.data.y, inst.beta_tilde, 0.0);
  ASSERT_EQ(r.lp_status, LpStatus::kOptimal);
  EXPECT_LT(NormalizedError(*r.beta_hat, inst.beta_star), 1e-5);
}

// The anchor puts x_i / 2n on the block active at x_i under beta_tilde, and that block's
// row caps <x_i, beta_j> by y_i + t_i. So <theta, beta> <= (sum y_i + n eta) / 2n on every
// feasible point and the LP never has an improving ray.
TEST(FitCeTest, SingleSampleOptimumIsHalfTheResponse) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SynthInstance inst = GenerateInstance(Config(1, 3, 2, 0, seed));
    for (LpRoute route : {LpRoute::kDual, LpRoute::kPrimal}) {
      CeOptions opt;
      opt.route = route;
      const CeFitResult r = FitCe(inst.data.X, inst.data.y, inst.beta_tilde, 0.0, opt);
      ASSERT_EQ(r.lp_status, LpStatus::kOptimal);
      EXPECT_NEAR(r.objective, inst.data.y[0] / 2, 1e-9 * (1 + std::abs(inst.data.y[0])));
    }
  }
}

TEST(FitCeTest, ObjectiveIsCappedByTheResponses) {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const std::size_t n = 2 + seed % 7;
    const SynthInstance inst = GenerateInstance(Config(n, 3, 3, 0.3, seed));
    const double eta = ComputeEta(*inst.data.w);
    const CeFitResult r = FitCe(inst.data.X, inst.data.y, inst.beta_tilde, eta);
    ASSERT_EQ(r.lp_status, LpStatus::kOptimal);
    double cap = n * eta;
    for (double v : inst.data.y) cap += v;
    cap /= 2.0 * static_cast<double>(n);
    EXPECT_LE(r.objective, cap + 1e-9);
  }
}

TEST(FitCeTest, RoutesAgree) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const SynthInstance inst = GenerateInstance(Config(60, 3, 2, seed % 2 ? 0.1 : 0.0, seed));
    const double eta = ComputeEta(*inst.data.w);
    CeOptions primal;
    primal.route = LpRoute::kPrimal;
    const CeFitResult a = FitCe(inst.data.X, inst.data.y, inst.beta_tilde, eta);
    const CeFitResult b = FitCe(inst.data.X, inst.data.y, inst.beta_tilde, eta, primal);
    ASSERT_EQ(a.lp_status, b.lp_status);
    if (a.lp_status != LpStatus::kOptimal) continue;
    EXPECT_NEAR(a.objective, b.objective, 1e-9 * (1 + std::abs(a.objective)));
  }
}

TEST(FitCeTest, OptimumDominatesTruthAndRespectsBudget) {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const SynthInstance inst = GenerateInstance(Config(150, 4, 3, 0.2, seed));
    const double eta = ComputeEta(*inst.data.w);
    const CeFitResult r = FitCe(inst.data.X, inst.data.y, inst.beta_tilde, eta);
    ASSERT_EQ(r.lp_status, LpStatus::kOptimal);
    EXPECT_LE(r.residual_budget_used, eta + 1e-9);
    EXPECT_LE(PositiveResidualObjective(*r.beta_hat, inst.data), eta + 1e-9);
    const double truth_obj = Dot(r.anchor.theta, inst.beta_star.flat());
    EXPECT_GE(r.objective, truth_obj - 1e-8);
    EXPECT_NEAR(r.objective, Dot(r.anchor.theta, r.beta_hat->flat()), 1e-9);
  }
}

TEST(FitCeTest, AnchorScalingDoesNotMoveTheSolution) {
  const SynthInstance inst = GenerateInstance(Config(80, 3, 2, 0.1, 21));
  const double eta = ComputeEta(*inst.data.w);
  AnchorVector a = BuildAnchor(inst.data.X, inst.beta_tilde);
  const LpSolution base = Solve(AssembleLp(inst.data.X, inst.data.y, a, eta));
  for (double& v : a.theta) v *= 2.0;
  const LpSolution doubled = Solve(AssembleLp(inst.data.X, inst.data.y, a, eta));
  ASSERT_EQ(base.status, LpStatus::kOptimal);
  ASSERT_EQ(doubled.status, LpStatus::kOptimal);
  EXPECT_NEAR(doubled.objective_value, 2 * base.objective_value, 1e-9);
  for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(base.x[j], doubled.x[j], 1e-7);
}

}  // namespace
}  // namespace maxlin
