#include "maxlin/linalg.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace maxlin {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("DenseMatrix: expected " +
                                std::to_string(rows_ * cols_) + " entries, got " +
                                std::to_string(data_.size()));
  }
}

DenseMatrix DenseMatrix::Identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::FromRows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  DenseMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw std::invalid_argument("DenseMatrix::FromRows: ragged rows");
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

DenseMatrix DenseMatrix::SelectRows(std::span<const std::size_t> indices) const {
  DenseMatrix out(indices.size(), cols_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto src = row(indices[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

DenseMatrix DenseMatrix::Transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm2(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

std::vector<double> MatVec(const DenseMatrix& a, std::span<const double> v) {
  if (v.size() != a.cols()) {
    throw std::invalid_argument("MatVec: matrix has " + std::to_string(a.cols()) +
                                " columns, vector has " + std::to_string(v.size()));
  }
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = Dot(a.row(i), v);
  return out;
}

std::vector<double> MatTVec(const DenseMatrix& a, std::span<const double> v) {
  if (v.size() != a.rows()) {
    throw std::invalid_argument("MatTVec: dimension mismatch");
  }
  std::vector<double> out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += r[j] * v[i];
  }
  return out;
}

namespace {

constexpr double kRankThreshold = 1e-12;

// Column-major working copy so Householder sweeps run over contiguous memory.
struct ColumnMajor {
  std::size_t rows, cols;
  std::vector<double> data;
  double* col(std::size_t j) { return data.data() + j * rows; }
  const double* col(std::size_t j) const { return data.data() + j * rows; }
};

// Turns x[0..len) into a Householder vector v (in place) with
// (I - tau v v^T) x_orig = (alpha, 0, ..., 0). Returns tau; alpha is written
// to *alpha. tau == 0 means the reflector is the identity.
double MakeReflector(double* x, std::size_t len, double* alpha) {
  double norm = 0.0;
  for (std::size_t i = 0; i < len; ++i) norm += x[i] * x[i];
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    *alpha = 0.0;
    return 0.0;
  }
  *alpha = x[0] >= 0.0 ? -norm : norm;
  x[0] -= *alpha;
  double vtv = 0.0;
  for (std::size_t i = 0; i < len; ++i) vtv += x[i] * x[i];
  return 2.0 / vtv;
}

void ApplyReflector(const double* v, std::size_t len, double tau, double* y) {
  if (tau == 0.0) return;
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += v[i] * y[i];
  s *= tau;
  for (std::size_t i = 0; i < len; ++i) y[i] -= s * v[i];
}

struct PivotedQr {
  ColumnMajor r;                  // R above the diagonal, reflectors below
  std::vector<double> diag;       // diagonal of R
  std::vector<double> tau;
  std::vector<std::size_t> perm;  // column s of R is column perm[s] of A
  std::size_t rank = 0;
};

PivotedQr FactorPivoted(const DenseMatrix& a) {
  const std::size_t m = a.rows(), q = a.cols();
  PivotedQr f;
  f.r = {m, q, std::vector<double>(m * q)};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < q; ++j) f.r.col(j)[i] = a(i, j);
  f.perm.resize(q);
  std::iota(f.perm.begin(), f.perm.end(), 0);
  const std::size_t steps = std::min(m, q);
  f.diag.assign(steps, 0.0);
  f.tau.assign(steps, 0.0);

  for (std::size_t s = 0; s < steps; ++s) {
    // Pivot on the largest remaining column norm (recomputed exactly).
    std::size_t best = s;
    double best_norm = -1.0;
    for (std::size_t j = s; j < q; ++j) {
      const double* c = f.r.col(j);
      double nrm = 0.0;
      for (std::size_t i = s; i < m; ++i) nrm += c[i] * c[i];
      if (nrm > best_norm) {
        best_norm = nrm;
        best = j;
      }
    }
    if (best != s) {
      std::swap_ranges(f.r.col(s), f.r.col(s) + m, f.r.col(best));
      std::swap(f.perm[s], f.perm[best]);
    }
    double* v = f.r.col(s) + s;
    double alpha = 0.0;
    f.tau[s] = MakeReflector(v, m - s, &alpha);
    f.diag[s] = alpha;
    for (std::size_t j = s + 1; j < q; ++j) {
      ApplyReflector(v, m - s, f.tau[s], f.r.col(j) + s);
    }
  }

  const double lead = steps > 0 ? std::abs(f.diag[0]) : 0.0;
  while (f.rank < steps && lead > 0.0 &&
         std::abs(f.diag[f.rank]) > kRankThreshold * lead) {
    ++f.rank;
  }
  return f;
}

}  // namespace

std::size_t NumericalRank(const DenseMatrix& a) { return FactorPivoted(a).rank; }

std::vector<double> LeastSquares(const DenseMatrix& a, std::span<const double> b) {
  const std::size_t m = a.rows(), q = a.cols();
  if (m == 0 || q == 0) throw std::invalid_argument("LeastSquares: empty matrix");
  if (b.size() != m) {
    throw std::invalid_argument("LeastSquares: matrix has " + std::to_string(m) +
                                " rows, rhs has " + std::to_string(b.size()));
  }
  PivotedQr f = FactorPivoted(a);
  std::vector<double> x(q, 0.0);
  const std::size_t r = f.rank;
  if (r == 0) return x;

  // c = first r entries of Q^T b.
  std::vector<double> qtb(b.begin(), b.end());
  for (std::size_t s = 0; s < r; ++s) {
    ApplyReflector(f.r.col(s) + s, m - s, f.tau[s], qtb.data() + s);
  }
  auto upper = [&](std::size_t i, std::size_t j) {
    return i == j ? f.diag[i] : f.r.col(j)[i];
  };

  std::vector<double> u(q, 0.0);
  if (r == q) {
    for (std::size_t ii = r; ii-- > 0;) {
      double s = qtb[ii];
      for (std::size_t j = ii + 1; j < r; ++j) s -= upper(ii, j) * u[j];
      u[ii] = s / f.diag[ii];
    }
  } else {
    // Minimum-norm solution of [R11 R12] u = c. Factor the transpose of the
    // r x q trapezoid as Z [S; 0]; then [R11 R12] = [S^T 0] Z^T.
    ColumnMajor t{q, r, std::vector<double>(q * r, 0.0)};
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = i; j < q; ++j) t.col(i)[j] = upper(i, j);
    std::vector<double> sdiag(r), stau(r);
    for (std::size_t s = 0; s < r; ++s) {
      double alpha = 0.0;
      stau[s] = MakeReflector(t.col(s) + s, q - s, &alpha);
      sdiag[s] = alpha;
      for (std::size_t j = s + 1; j < r; ++j) {
        ApplyReflector(t.col(s) + s, q - s, stau[s], t.col(j) + s);
      }
    }
    // S^T v = c, with S upper triangular (diag sdiag, S(i,j) = t.col(j)[i]).
    for (std::size_t i = 0; i < r; ++i) {
      double s = qtb[i];
      for (std::size_t j = 0; j < i; ++j) s -= t.col(i)[j] * u[j];
      u[i] = s / sdiag[i];
    }
    for (std::size_t s = r; s-- > 0;) {
      ApplyReflector(t.col(s) + s, q - s, stau[s], u.data() + s);
    }
  }
  for (std::size_t s = 0; s < q; ++s) x[f.perm[s]] = u[s];
  return x;
}

}  // namespace maxlin
