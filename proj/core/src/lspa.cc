#include "maxlin/lspa.h"

#include <stdexcept>
#include <utility>

namespace maxlin {

std::vector<std::size_t> Partition(const DenseMatrix& x, const ParamBlocks& beta) {
  if (x.cols() != beta.p()) throw std::invalid_argument("Partition: dimension mismatch");
  std::vector<std::size_t> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = ConeIndex(x.row(i), beta);
  return out;
}

ParamBlocks LspaRefit(const DenseMatrix& x, std::span<const double> y,
                      const ParamBlocks& beta, std::span<const std::size_t> assignment) {
  if (x.cols() != beta.p() || y.size() != x.rows() || assignment.size() != x.rows()) {
    throw std::invalid_argument("LspaRefit: dimension mismatch");
  }
  std::vector<std::vector<std::size_t>> members(beta.k());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    members.at(assignment[i]).push_back(i);
  }
  ParamBlocks next = beta;
  for (std::size_t j = 0; j < beta.k(); ++j) {
    if (members[j].empty()) continue;
    const DenseMatrix sub = x.SelectRows(members[j]);
    std::vector<double> rhs(members[j].size());
    for (std::size_t r = 0; r < rhs.size(); ++r) rhs[r] = y[members[j][r]];
    const std::vector<double> fit = LeastSquares(sub, rhs);
    std::copy(fit.begin(), fit.end(), next.block(j).begin());
  }
  return next;
}

ParamBlocks LspaStep(const DenseMatrix& x, std::span<const double> y,
                     const ParamBlocks& beta) {
  return LspaRefit(x, y, beta, Partition(x, beta));
}

LspaResult FitLspa(const DenseMatrix& x, std::span<const double> y,
                   const ParamBlocks& beta_init, std::size_t max_iter) {
  if (max_iter == 0) throw std::invalid_argument("FitLspa: max_iter must be >= 1");
  LspaResult result{beta_init, 0, false, Partition(x, beta_init)};
  for (std::size_t it = 1; it <= max_iter; ++it) {
    result.beta_hat = LspaRefit(x, y, result.beta_hat, result.final_assignment);
    result.iterations_run = it;
    std::vector<std::size_t> assignment = Partition(x, result.beta_hat);
    const bool same = assignment == result.final_assignment;
    result.final_assignment = std::move(assignment);
    if (same) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace maxlin
