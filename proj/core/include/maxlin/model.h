#ifndef MAXLIN_MODEL_H_
#define MAXLIN_MODEL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "maxlin/linalg.h"

namespace maxlin {

// A k-block parameter vector [b_1; ...; b_k] with each block in R^p, stored
// as one contiguous k*p vector. Component indices are 0-based.
class ParamBlocks {
 public:
  ParamBlocks() = default;
  // All-zero parameter.
  ParamBlocks(std::size_t k, std::size_t p);
  // Takes ownership of a flat k*p vector. Throws std::invalid_argument on a
  // size mismatch, zero k/p or non-finite entries.
  ParamBlocks(std::size_t k, std::size_t p, std::vector<double> flat);

  static ParamBlocks FromBlocks(const std::vector<std::vector<double>>& blocks);

  std::size_t k() const { return k_; }
  std::size_t p() const { return p_; }
  std::size_t size() const { return flat_.size(); }

  std::span<const double> block(std::size_t j) const {
    return {flat_.data() + j * p_, p_};
  }
  std::span<double> block(std::size_t j) { return {flat_.data() + j * p_, p_}; }

  std::span<const double> flat() const { return flat_; }
  std::span<double> flat() { return flat_; }

  friend bool operator==(const ParamBlocks&, const ParamBlocks&) = default;

 private:
  std::size_t k_ = 0;
  std::size_t p_ = 0;
  std::vector<double> flat_;
};

// Regressors X (n x p, rows x_i), observations y and, for synthetic data, the
// realized noise w with y_i = f_i(beta_star) + w_i.
struct Dataset {
  DenseMatrix X;
  std::vector<double> y;
  std::optional<std::vector<double>> w;

  std::size_t n() const { return X.rows(); }
  std::size_t p() const { return X.cols(); }

  // Throws std::invalid_argument if the sizes disagree or any entry is not
  // finite.
  void Validate() const;
};

struct MaxLinearValue {
  double value;
  std::size_t argmax;  // smallest index attaining the maximum
};

// max_j <x, beta_j>.
MaxLinearValue EvalMaxLinear(std::span<const double> x, const ParamBlocks& beta);

// Subgradient of beta -> max_j <x, beta_j>: zero except the argmax block,
// which equals x. Returned as a flat k*p vector.
std::vector<double> Subgradient(std::span<const double> x,
                                const ParamBlocks& beta);

// Index j of the polyhedral cone {x : <x, beta_j - beta_l> >= 0 for all l}
// containing x. Lowest index on ties, so it always agrees with the argmax of
// EvalMaxLinear.
std::size_t ConeIndex(std::span<const double> x, const ParamBlocks& beta);

// Sum of the block l2 norms.
double Norm12(const ParamBlocks& z);

// (1/n) sum_i |f_i(beta) - y_i|.
double LadObjective(const ParamBlocks& beta, const Dataset& data);

// (1/n) sum_i (f_i(beta) - y_i)_+.
double PositiveResidualObjective(const ParamBlocks& beta, const Dataset& data);

// sum_j ||hat_j - star_j|| / sum_j ||star_j||, blocks matched by index.
// Throws std::invalid_argument if beta_star is zero or shapes differ.
double NormalizedError(const ParamBlocks& beta_hat, const ParamBlocks& beta_star);

// Elementwise a - b. Shapes must match.
ParamBlocks Difference(const ParamBlocks& a, const ParamBlocks& b);

}  // namespace maxlin

#endif  // MAXLIN_MODEL_H_
