#ifndef MAXLIN_LINALG_H_
#define MAXLIN_LINALG_H_

#include <cstddef>
#include <span>
#include <vector>

namespace maxlin {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  // Throws std::invalid_argument if data.size() != rows * cols.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix Identity(std::size_t n);
  static DenseMatrix FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const { return data_; }

  // Rows selected by index, in the given order.
  DenseMatrix SelectRows(std::span<const std::size_t> indices) const;
  DenseMatrix Transposed() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> v);

// A * v. Throws std::invalid_argument on a dimension mismatch.
std::vector<double> MatVec(const DenseMatrix& a, std::span<const double> v);
// A^T * v.
std::vector<double> MatTVec(const DenseMatrix& a, std::span<const double> v);

// Minimizer of ||A x - b||_2 via Householder QR with column pivoting. When A
// is rank deficient (diagonal of R below 1e-12 |r_11|) the minimum-norm
// minimizer is returned, obtained from a second orthogonal reduction of the
// leading trapezoid. Throws std::invalid_argument on a dimension mismatch.
std::vector<double> LeastSquares(const DenseMatrix& a, std::span<const double> b);

// Numerical rank used by LeastSquares.
std::size_t NumericalRank(const DenseMatrix& a);

}  // namespace maxlin

#endif  // MAXLIN_LINALG_H_
