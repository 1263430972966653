#ifndef MAXLIN_CE_H_
#define MAXLIN_CE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "maxlin/linalg.h"
#include "maxlin/lp.h"
#include "maxlin/model.h"

namespace maxlin {

// theta = (1/2n) sum_i grad f_i(beta_tilde), laid out like ParamBlocks.
struct AnchorVector {
  std::size_t k = 0;
  std::size_t p = 0;
  std::vector<double> theta;
};

AnchorVector BuildAnchor(const DenseMatrix& x, const ParamBlocks& beta_tilde);

// Variables are [beta (k*p, free); t (n, >= 0)]. Rows, in order:
//   <x_i, beta_j> - t_i <= y_i   for i in [n], j in [k]  (row i*k + j)
//   sum_i t_i <= n * eta
// with objective maximize <theta, beta>. Throws std::invalid_argument for
// eta < 0 or mismatched dimensions.
LpProblem AssembleLp(const DenseMatrix& x, std::span<const double> y,
                     const AnchorVector& theta, double eta);

enum class LpRoute {
  kDual,    // simplex on the dual; basis size k*p + n instead of n*k + 1
  kPrimal,  // simplex on the assembled LP directly
};

struct CeOptions {
  LpRoute route = LpRoute::kDual;
  SolverOptions solver;
};

struct CeFitResult {
  std::optional<ParamBlocks> beta_hat;  // present iff lp_status is optimal
  LpStatus lp_status = LpStatus::kInfeasible;
  double objective = 0.0;             // <theta, beta_hat>
  double residual_budget_used = 0.0;  // (1/n) sum_i t_i at the optimum
  std::size_t solve_iterations = 0;
  AnchorVector anchor;
};

// Anchored regression: maximize <theta, beta> subject to
// (1/n) sum_i (f_i(beta) - y_i)_+ <= eta, solved as the LP above.
CeFitResult FitCe(const DenseMatrix& x, std::span<const double> y,
                  const ParamBlocks& beta_tilde, double eta,
                  const CeOptions& options = {});

}  // namespace maxlin

#endif  // MAXLIN_CE_H_
