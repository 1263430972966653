#include "maxlin/ce.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace maxlin {

AnchorVector BuildAnchor(const DenseMatrix& x, const ParamBlocks& beta_tilde) {
  if (x.cols() != beta_tilde.p()) {
    throw std::invalid_argument("BuildAnchor: regressors have " +
                                std::to_string(x.cols()) + " columns, parameter has p=" +
                                std::to_string(beta_tilde.p()));
  }
  if (x.rows() == 0) throw std::invalid_argument("BuildAnchor: no samples");
  AnchorVector a{beta_tilde.k(), beta_tilde.p(), std::vector<double>(beta_tilde.size())};
  const double scale = 1.0 / (2.0 * static_cast<double>(x.rows()));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto xi = x.row(i);
    const std::size_t j = ConeIndex(xi, beta_tilde);
    for (std::size_t c = 0; c < a.p; ++c) a.theta[j * a.p + c] += scale * xi[c];
  }
  return a;
}

LpProblem AssembleLp(const DenseMatrix& x, std::span<const double> y,
                     const AnchorVector& theta, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("AssembleLp: eta must be finite and >= 0");
  }
  const std::size_t n = x.rows(), p = x.cols(), k = theta.k;
  if (theta.p != p || theta.theta.size() != k * p || y.size() != n) {
    throw std::invalid_argument("AssembleLp: dimension mismatch");
  }
  const std::size_t kp = k * p;
  LpProblem lp(kp + n);
  for (std::size_t v = 0; v < kp; ++v) {
    lp.objective[v] = theta.theta[v];
    lp.bounds[v] = {-kInf, kInf};
  }
  lp.constraints.reserve(n * k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> row(kp + n, 0.0);
      std::copy(xi.begin(), xi.end(), row.begin() + static_cast<std::ptrdiff_t>(j * p));
      row[kp + i] = -1.0;
      lp.AddConstraint(std::move(row), RowSense::kLessEqual, y[i]);
    }
  }
  std::vector<double> budget(kp + n, 0.0);
  for (std::size_t i = 0; i < n; ++i) budget[kp + i] = 1.0;
  lp.AddConstraint(std::move(budget), RowSense::kLessEqual,
                   static_cast<double>(n) * eta);
  return lp;
}

CeFitResult FitCe(const DenseMatrix& x, std::span<const double> y,
                  const ParamBlocks& beta_tilde, double eta, const CeOptions& options) {
  CeFitResult result;
  result.anchor = BuildAnchor(x, beta_tilde);
  const LpProblem lp = AssembleLp(x, y, result.anchor, eta);
  const LpSolution sol = options.route == LpRoute::kDual
                             ? SolveViaDual(lp, options.solver)
                             : Solve(lp, options.solver);
  result.lp_status = sol.status;
  result.solve_iterations = sol.iterations;
  if (sol.status != LpStatus::kOptimal) return result;

  const std::size_t kp = beta_tilde.size(), n = x.rows();
  std::vector<double> flat(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(kp));
  result.beta_hat.emplace(beta_tilde.k(), beta_tilde.p(), std::move(flat));
  result.objective = Dot(result.anchor.theta, result.beta_hat->flat());
  double budget = 0.0;
  for (std::size_t i = 0; i < n; ++i) budget += sol.x[kp + i];
  result.residual_budget_used = budget / static_cast<double>(n);
  return result;
}

}  // namespace maxlin
