#ifndef MAXLIN_LSPA_H_
#define MAXLIN_LSPA_H_

#include <cstddef>
#include <span>
#include <vector>

#include "maxlin/linalg.h"
#include "maxlin/model.h"

namespace maxlin {

// Least-squares partition algorithm: alternate cone assignment and
// per-cone least squares.

struct LspaResult {
  ParamBlocks beta_hat;
  std::size_t iterations_run = 0;
  bool converged = false;  // the assignment reached a fixed point
  std::vector<std::size_t> final_assignment;
};

// i -> ConeIndex(x_i, beta).
std::vector<std::size_t> Partition(const DenseMatrix& x, const ParamBlocks& beta);

// One refit: each block with a nonempty partition becomes the (minimum-norm)
// least-squares fit on its rows; blocks with empty partitions are kept.
ParamBlocks LspaStep(const DenseMatrix& x, std::span<const double> y,
                     const ParamBlocks& beta);

// Same, with the assignment supplied.
ParamBlocks LspaRefit(const DenseMatrix& x, std::span<const double> y,
                      const ParamBlocks& beta, std::span<const std::size_t> assignment);

// Runs LspaStep until the assignment repeats or max_iter steps have run.
LspaResult FitLspa(const DenseMatrix& x, std::span<const double> y,
                   const ParamBlocks& beta_init, std::size_t max_iter = 200);

}  // namespace maxlin

#endif  // MAXLIN_LSPA_H_
