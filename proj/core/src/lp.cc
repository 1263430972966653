#include "maxlin/lp.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "maxlin/csv_io.h"

namespace maxlin {

std::string_view ToString(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

void LpProblem::AddConstraint(std::vector<double> coeffs, RowSense sense, double rhs) {
  if (coeffs.size() != num_vars) {
    throw std::invalid_argument("LpProblem::AddConstraint: expected " + std::to_string(num_vars) +
                                " coefficients, got " + std::to_string(coeffs.size()));
  }
  constraints.push_back(LpConstraint{std::move(coeffs), sense, rhs});
}

void LpProblem::Validate() const {
  if (objective.size() != num_vars || bounds.size() != num_vars) {
    throw std::invalid_argument("LpProblem: objective/bounds size != num_vars");
  }
  for (std::size_t r = 0; r < constraints.size(); ++r) {
    const auto& c = constraints[r];
    if (c.coeffs.size() != num_vars) {
      throw std::invalid_argument("LpProblem: row " + std::to_string(r) +
                                  " has the wrong number of coefficients");
    }
    if (!std::isfinite(c.rhs)) {
      throw std::invalid_argument("LpProblem: row " + std::to_string(r) +
                                  " has a non-finite rhs");
    }
  }
  for (std::size_t j = 0; j < num_vars; ++j) {
    if (std::isnan(bounds[j].lower) || std::isnan(bounds[j].upper) ||
        bounds[j].lower > bounds[j].upper || bounds[j].lower == kInf ||
        bounds[j].upper == -kInf) {
      throw std::invalid_argument("LpProblem: invalid bounds on variable " +
                                  std::to_string(j));
    }
  }
}

// ---------------------------------------------------------------------------
// Canonical form.

std::vector<double> StandardForm::Reconstruct(std::span<const double> z) const {
  std::vector<double> x(var_map.size());
  for (std::size_t j = 0; j < var_map.size(); ++j) {
    const VarMap& m = var_map[j];
    switch (m.kind) {
      case VarKind::kShifted:
        x[j] = m.offset + z[m.col];
        break;
      case VarKind::kMirrored:
        x[j] = m.offset - z[m.col];
        break;
      case VarKind::kSplit:
        x[j] = z[m.col] - z[m.col_neg];
        break;
    }
  }
  return x;
}

StandardForm ToStandardForm(const LpProblem& problem) {
  problem.Validate();
  StandardForm sf;
  const std::size_t nv = problem.num_vars;
  sf.var_map.resize(nv);

  std::size_t next_col = 0;
  std::vector<std::size_t> bounded_vars;  // shifted variables with finite upper
  for (std::size_t j = 0; j < nv; ++j) {
    const VarBounds& b = problem.bounds[j];
    auto& m = sf.var_map[j];
    if (std::isfinite(b.lower)) {
      m = {StandardForm::VarKind::kShifted, next_col++, 0, b.lower};
      if (std::isfinite(b.upper)) bounded_vars.push_back(j);
    } else if (std::isfinite(b.upper)) {
      m = {StandardForm::VarKind::kMirrored, next_col++, 0, b.upper};
    } else {
      m = {StandardForm::VarKind::kSplit, next_col, next_col + 1, 0.0};
      next_col += 2;
    }
  }
  sf.num_structural = next_col;

  const std::size_t nrows = problem.constraints.size() + bounded_vars.size();
  sf.num_rows = nrows;
  sf.num_constraint_rows = problem.constraints.size();
  sf.rhs.assign(nrows, 0.0);
  sf.row_sign.assign(nrows, 1.0);
  sf.unit_slack.assign(nrows, StandardForm::npos);

  std::vector<std::vector<std::pair<std::size_t, double>>> cols(sf.num_structural);
  std::vector<std::pair<std::size_t, double>> slacks;  // (row, coefficient)

  for (std::size_t r = 0; r < problem.constraints.size(); ++r) {
    const LpConstraint& c = problem.constraints[r];
    double rhs = c.rhs;
    for (std::size_t j = 0; j < nv; ++j) {
      if (c.coeffs[j] != 0.0 && sf.var_map[j].kind != StandardForm::VarKind::kSplit) {
        rhs -= c.coeffs[j] * sf.var_map[j].offset;
      }
    }
    const double sign = rhs < 0.0 ? -1.0 : 1.0;
    sf.row_sign[r] = sign;
    sf.rhs[r] = sign * rhs;
    for (std::size_t j = 0; j < nv; ++j) {
      const double a = c.coeffs[j];
      if (a == 0.0) continue;
      const auto& m = sf.var_map[j];
      switch (m.kind) {
        case StandardForm::VarKind::kShifted:
          cols[m.col].emplace_back(r, sign * a);
          break;
        case StandardForm::VarKind::kMirrored:
          cols[m.col].emplace_back(r, -sign * a);
          break;
        case StandardForm::VarKind::kSplit:
          cols[m.col].emplace_back(r, sign * a);
          cols[m.col_neg].emplace_back(r, -sign * a);
          break;
      }
    }
    if (c.sense == RowSense::kLessEqual) slacks.emplace_back(r, sign);
    if (c.sense == RowSense::kGreaterEqual) slacks.emplace_back(r, -sign);
  }
  for (std::size_t b = 0; b < bounded_vars.size(); ++b) {
    const std::size_t r = problem.constraints.size() + b;
    const std::size_t j = bounded_vars[b];
    cols[sf.var_map[j].col].emplace_back(r, 1.0);
    sf.rhs[r] = problem.bounds[j].upper - problem.bounds[j].lower;
    slacks.emplace_back(r, 1.0);
  }

  sf.num_cols = sf.num_structural + slacks.size();
  sf.cost.assign(sf.num_cols, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    const auto& m = sf.var_map[j];
    const double c = problem.objective[j];
    switch (m.kind) {
      case StandardForm::VarKind::kShifted:
        sf.cost[m.col] = c;
        sf.objective_offset += c * m.offset;
        break;
      case StandardForm::VarKind::kMirrored:
        sf.cost[m.col] = -c;
        sf.objective_offset += c * m.offset;
        break;
      case StandardForm::VarKind::kSplit:
        sf.cost[m.col] = c;
        sf.cost[m.col_neg] = -c;
        break;
    }
  }

  sf.col_start.reserve(sf.num_cols + 1);
  sf.col_start.push_back(0);
  for (const auto& col : cols) {
    for (const auto& [row, v] : col) {
      sf.row_index.push_back(row);
      sf.values.push_back(v);
    }
    sf.col_start.push_back(sf.row_index.size());
  }
  for (std::size_t s = 0; s < slacks.size(); ++s) {
    const auto [row, v] = slacks[s];
    sf.row_index.push_back(row);
    sf.values.push_back(v);
    sf.col_start.push_back(sf.row_index.size());
    if (v == 1.0 && sf.unit_slack[row] == StandardForm::npos) {
      sf.unit_slack[row] = sf.num_structural + s;
    }
  }
  return sf;
}

// ---------------------------------------------------------------------------
// Revised simplex.

namespace {

// LU factorization with partial pivoting of a dense square matrix:
// P B = L U with unit lower L.
// Sparse LU of the basis matrix.
class BasisLu {
 public:
  // Returns false if the matrix is numerically singular.
  bool Factor(std::vector<Eigen::Triplet<double>>& entries, std::size_t m) {
    Eigen::SparseMatrix<double> b(static_cast<Eigen::Index>(m),
                                  static_cast<Eigen::Index>(m));
    b.setFromTriplets(entries.begin(), entries.end());
    b.makeCompressed();
    lu_.analyzePattern(b);
    lu_.factorize(b);
    if (lu_.info() != Eigen::Success) return false;
    return std::isfinite(lu_.logAbsDeterminant());
  }

  // B x = b, in place.
  void Solve(std::vector<double>& b) const {
    Eigen::Map<Eigen::VectorXd> v(b.data(), static_cast<Eigen::Index>(b.size()));
    v = lu_.solve(v);
  }

  // B^T y = c, in place.
  void SolveTranspose(std::vector<double>& c) const {
    Eigen::Map<Eigen::VectorXd> v(c.data(), static_cast<Eigen::Index>(c.size()));
    v = lu_.transpose().solve(v);
  }

 private:
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

class RevisedSimplex {
 public:
  RevisedSimplex(const StandardForm& sf, const SolverOptions& opt)
      : sf_(sf), opt_(opt), m_(sf.num_rows) {
    max_iterations_ = opt.max_iterations > 0 ? opt.max_iterations
                                             : 50 * (sf.num_rows + sf.num_cols);
    basis_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      if (sf.unit_slack[r] != StandardForm::npos) {
        basis_[r] = sf.unit_slack[r];
      } else {
        basis_[r] = sf.num_cols + art_row_.size();
        art_row_.push_back(r);
      }
    }
    total_cols_ = sf.num_cols + art_row_.size();
    is_basic_.assign(total_cols_, 0);
    for (std::size_t r = 0; r < m_; ++r) is_basic_[basis_[r]] = 1;
    barred_.assign(total_cols_, 0);
    cost_.assign(total_cols_, 0.0);
  }

  LpSolution Run() {
    LpSolution sol;
    if (!Refactor()) throw std::runtime_error("simplex: initial basis is singular");

    if (!art_row_.empty()) {
      for (std::size_t a = 0; a < art_row_.size(); ++a) cost_[sf_.num_cols + a] = -1.0;
      const LpStatus s1 = Iterate();
      sol.iterations = iterations_;
      if (s1 == LpStatus::kIterationLimit) {
        sol.status = s1;
        return sol;
      }
      double infeas = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        if (IsArtificial(basis_[r])) infeas += std::max(0.0, xb_[r]);
      }
      double rhs_scale = 0.0;
      for (double b : sf_.rhs) rhs_scale = std::max(rhs_scale, std::abs(b));
      if (infeas > opt_.tol * (1.0 + rhs_scale)) {
        sol.status = LpStatus::kInfeasible;
        return sol;
      }
      DriveOutArtificials();
    }

    // Artificials never (re-)enter in phase 2; basic ones left after the
    // drive-out sit on redundant rows at zero.
    for (std::size_t j = sf_.num_cols; j < total_cols_; ++j) barred_[j] = 1;
    std::fill(cost_.begin(), cost_.end(), 0.0);
    std::copy(sf_.cost.begin(), sf_.cost.end(), cost_.begin());
    phase2_ = true;
    nonimproving_ = 0;
    bland_ = false;
    if (!Refactor()) throw std::runtime_error("simplex: basis became singular");
    const LpStatus s2 = Iterate();
    sol.iterations = iterations_;
    sol.status = s2;
    sol.max_reduced_cost = last_max_reduced_cost_;
    if (s2 != LpStatus::kOptimal) return sol;

    std::vector<double> z(sf_.num_cols, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < sf_.num_cols) z[basis_[r]] = std::max(0.0, xb_[r]);
    }
    sol.x = sf_.Reconstruct(z);

    std::vector<double> y = BasicCosts();
    Btran(y);
    sol.duals.resize(sf_.num_constraint_rows);
    for (std::size_t r = 0; r < sf_.num_constraint_rows; ++r) {
      sol.duals[r] = sf_.row_sign[r] * y[r];
    }
    return sol;
  }

 private:
  bool IsArtificial(std::size_t j) const { return j >= sf_.num_cols; }

  double ColumnDot(std::size_t j, const std::vector<double>& y) const {
    if (IsArtificial(j)) return y[art_row_[j - sf_.num_cols]];
    double s = 0.0;
    for (std::size_t e = sf_.col_start[j]; e < sf_.col_start[j + 1]; ++e) {
      s += sf_.values[e] * y[sf_.row_index[e]];
    }
    return s;
  }

  std::vector<double> DenseColumn(std::size_t j) const {
    std::vector<double> v(m_, 0.0);
    if (IsArtificial(j)) {
      v[art_row_[j - sf_.num_cols]] = 1.0;
    } else {
      for (std::size_t e = sf_.col_start[j]; e < sf_.col_start[j + 1]; ++e) {
        v[sf_.row_index[e]] = sf_.values[e];
      }
    }
    return v;
  }

  std::vector<double> BasicCosts() const {
    std::vector<double> c(m_);
    for (std::size_t r = 0; r < m_; ++r) c[r] = cost_[basis_[r]];
    return c;
  }

  bool Refactor() {
    std::vector<Eigen::Triplet<double>> b;
    for (std::size_t r = 0; r < m_; ++r) {
      const int col = static_cast<int>(r);
      const std::size_t j = basis_[r];
      if (IsArtificial(j)) {
        b.emplace_back(static_cast<int>(art_row_[j - sf_.num_cols]), col, 1.0);
      } else {
        for (std::size_t e = sf_.col_start[j]; e < sf_.col_start[j + 1]; ++e) {
          b.emplace_back(static_cast<int>(sf_.row_index[e]), col, sf_.values[e]);
        }
      }
    }
    if (!lu_.Factor(b, m_)) return false;
    etas_.clear();
    xb_.assign(sf_.rhs.begin(), sf_.rhs.end());
    lu_.Solve(xb_);
    return true;
  }

  void Ftran(std::vector<double>& v) const {
    lu_.Solve(v);
    for (const Eta& eta : etas_) {
      const double pivot = v[eta.row] / eta.col[eta.row];
      if (pivot != 0.0) {
        for (std::size_t i = 0; i < m_; ++i) v[i] -= eta.col[i] * pivot;
      }
      v[eta.row] = pivot;
    }
  }

  void Btran(std::vector<double>& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const Eta& eta = *it;
      double s = v[eta.row];
      for (std::size_t i = 0; i < m_; ++i) {
        if (i != eta.row) s -= v[i] * eta.col[i];
      }
      v[eta.row] = s / eta.col[eta.row];
    }
    lu_.SolveTranspose(v);
  }

  void Pivot(std::size_t row, std::size_t entering, std::vector<double> w, double step) {
    for (std::size_t i = 0; i < m_; ++i) xb_[i] -= step * w[i];
    xb_[row] = step;
    is_basic_[basis_[row]] = 0;
    if (IsArtificial(basis_[row])) barred_[basis_[row]] = 1;
    basis_[row] = entering;
    is_basic_[entering] = 1;
    etas_.push_back(Eta{row, std::move(w)});
    ++iterations_;
  }

  LpStatus Iterate() {
    const double tol = opt_.tol;
    constexpr double kPivotTol = 1e-9;
    while (true) {
      if (iterations_ >= max_iterations_) return LpStatus::kIterationLimit;
      if (etas_.size() >= opt_.refactor_interval && !Refactor()) {
        throw std::runtime_error("simplex: basis became singular");
      }
      std::vector<double> y = BasicCosts();
      Btran(y);

      std::size_t entering = StandardForm::npos;
      double best = tol;
      double max_rc = -kInf;
      for (std::size_t j = 0; j < total_cols_; ++j) {
        if (is_basic_[j] || barred_[j]) continue;
        const double d = cost_[j] - ColumnDot(j, y);
        max_rc = std::max(max_rc, d);
        if (bland_) {
          if (d > tol) {
            entering = j;
            break;
          }
        } else if (d > best) {
          best = d;
          entering = j;
        }
      }
      if (entering == StandardForm::npos) {
        last_max_reduced_cost_ = max_rc == -kInf ? 0.0 : max_rc;
        return LpStatus::kOptimal;
      }
      const double rc = cost_[entering] - ColumnDot(entering, y);

      std::vector<double> w = DenseColumn(entering);
      Ftran(w);

      // Harris two-pass ratio test; artificials stuck on redundant rows block
      // at zero step in either direction.
      double theta_max = kInf;
      bool any = false;
      for (std::size_t i = 0; i < m_; ++i) {
        if (phase2_ && IsArtificial(basis_[i]) && std::abs(w[i]) > kPivotTol) {
          theta_max = 0.0;
          any = true;
        } else if (w[i] > kPivotTol) {
          theta_max = std::min(theta_max, (std::max(xb_[i], 0.0) + tol) / w[i]);
          any = true;
        }
      }
      if (!any) return LpStatus::kUnbounded;

      std::size_t leave = StandardForm::npos;
      double leave_ratio = 0.0;
      double leave_mag = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        double ratio;
        if (phase2_ && IsArtificial(basis_[i]) && std::abs(w[i]) > kPivotTol) {
          ratio = 0.0;
        } else if (w[i] > kPivotTol) {
          ratio = std::max(xb_[i], 0.0) / w[i];
        } else {
          continue;
        }
        if (bland_) {
          if (leave == StandardForm::npos || ratio < leave_ratio - 1e-12 ||
              (ratio <= leave_ratio + 1e-12 && basis_[i] < basis_[leave])) {
            leave = i;
            leave_ratio = ratio;
          }
        } else if (ratio <= theta_max && std::abs(w[i]) > leave_mag) {
          leave = i;
          leave_ratio = ratio;
          leave_mag = std::abs(w[i]);
        }
      }

      if (leave_ratio * rc > tol) {
        nonimproving_ = 0;
        bland_ = false;
      } else if (++nonimproving_ >= opt_.bland_after) {
        bland_ = true;
      }
      Pivot(leave, entering, std::move(w), leave_ratio);
    }
  }

  void DriveOutArtificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!IsArtificial(basis_[r])) continue;
      std::vector<double> rho(m_, 0.0);
      rho[r] = 1.0;
      Btran(rho);
      std::size_t best = StandardForm::npos;
      double best_mag = 1e-7;
      for (std::size_t j = 0; j < sf_.num_cols; ++j) {
        if (is_basic_[j]) continue;
        const double alpha = std::abs(ColumnDot(j, rho));
        if (alpha > best_mag) {
          best_mag = alpha;
          best = j;
        }
      }
      if (best == StandardForm::npos) continue;  // redundant row
      std::vector<double> w = DenseColumn(best);
      Ftran(w);
      const double step = xb_[r] / w[r];
      Pivot(r, best, std::move(w), step);
      if (etas_.size() >= opt_.refactor_interval && !Refactor()) {
        throw std::runtime_error("simplex: basis became singular");
      }
    }
  }

  struct Eta {
    std::size_t row;
    std::vector<double> col;
  };

  const StandardForm& sf_;
  SolverOptions opt_;
  std::size_t m_;
  std::size_t total_cols_ = 0;
  std::size_t max_iterations_ = 0;
  std::vector<std::size_t> art_row_;
  std::vector<std::size_t> basis_;
  std::vector<char> is_basic_;
  std::vector<char> barred_;
  std::vector<double> cost_;
  std::vector<double> xb_;
  BasisLu lu_;
  std::vector<Eta> etas_;
  bool phase2_ = false;
  bool bland_ = false;
  std::size_t nonimproving_ = 0;
  std::size_t iterations_ = 0;
  double last_max_reduced_cost_ = 0.0;
};

}  // namespace

LpSolution Solve(const LpProblem& problem, const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("Solve: tol must be > 0");
  const StandardForm sf = ToStandardForm(problem);
  LpSolution sol;
  if (sf.num_rows == 0) {
    // Only sign constraints: optimal at zero unless some cost is positive.
    for (double c : sf.cost) {
      if (c > options.tol) {
        sol.status = LpStatus::kUnbounded;
        return sol;
      }
    }
    sol.status = LpStatus::kOptimal;
    sol.x = sf.Reconstruct(std::vector<double>(sf.num_cols, 0.0));
  } else {
    RevisedSimplex simplex(sf, options);
    sol = simplex.Run();
  }
  if (sol.status == LpStatus::kOptimal) {
    sol.objective_value = 0.0;
    for (std::size_t j = 0; j < problem.num_vars; ++j) {
      sol.objective_value += problem.objective[j] * sol.x[j];
    }
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Dual route.

LpProblem Dualize(const LpProblem& primal) {
  primal.Validate();
  const std::size_t rows = primal.constraints.size();
  LpProblem dual(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const LpConstraint& c = primal.constraints[r];
    dual.objective[r] = -c.rhs;
    switch (c.sense) {
      case RowSense::kLessEqual:
        dual.bounds[r] = {0.0, kInf};
        break;
      case RowSense::kGreaterEqual:
        dual.bounds[r] = {-kInf, 0.0};
        break;
      case RowSense::kEqual:
        dual.bounds[r] = {-kInf, kInf};
        break;
    }
  }
  dual.constraints.reserve(primal.num_vars);
  for (std::size_t j = 0; j < primal.num_vars; ++j) {
    const VarBounds& b = primal.bounds[j];
    RowSense sense;
    if (b.lower == 0.0 && b.upper == kInf) {
      sense = RowSense::kGreaterEqual;
    } else if (b.lower == -kInf && b.upper == 0.0) {
      sense = RowSense::kLessEqual;
    } else if (b.lower == -kInf && b.upper == kInf) {
      sense = RowSense::kEqual;
    } else {
      throw std::invalid_argument("Dualize: variable " + std::to_string(j) +
                                  " must be nonnegative, nonpositive or free");
    }
    std::vector<double> row(rows);
    for (std::size_t r = 0; r < rows; ++r) row[r] = primal.constraints[r].coeffs[j];
    dual.AddConstraint(std::move(row), sense, primal.objective[j]);
  }
  return dual;
}

LpSolution SolveViaDual(const LpProblem& primal, const SolverOptions& options) {
  const LpProblem dual = Dualize(primal);
  LpSolution ds = Solve(dual, options);
  LpSolution sol;
  sol.iterations = ds.iterations;
  switch (ds.status) {
    case LpStatus::kOptimal:
      sol.status = LpStatus::kOptimal;
      sol.x.resize(primal.num_vars);
      for (std::size_t j = 0; j < primal.num_vars; ++j) sol.x[j] = -ds.duals[j];
      sol.duals = ds.x;
      sol.max_reduced_cost = ds.max_reduced_cost;
      for (std::size_t j = 0; j < primal.num_vars; ++j) {
        sol.objective_value += primal.objective[j] * sol.x[j];
      }
      return sol;
    case LpStatus::kUnbounded:
      sol.status = LpStatus::kInfeasible;
      return sol;
    case LpStatus::kIterationLimit:
      sol.status = LpStatus::kIterationLimit;
      return sol;
    case LpStatus::kInfeasible: {
      LpSolution direct = Solve(primal, options);
      direct.iterations += ds.iterations;
      return direct;
    }
  }
  return sol;
}

// ---------------------------------------------------------------------------

VerifyReport VerifySolution(const LpProblem& problem, std::span<const double> x,
                            double tol) {
  problem.Validate();
  if (x.size() != problem.num_vars) {
    throw std::invalid_argument("VerifySolution: x has " + std::to_string(x.size()) +
                                " entries, problem has " +
                                std::to_string(problem.num_vars) + " variables");
  }
  VerifyReport rep;
  rep.feasible = true;
  auto record = [&](double violation, double scale) {
    violation = std::max(0.0, violation);
    rep.max_violation = std::max(rep.max_violation, violation);
    if (violation > tol * (1.0 + std::abs(scale))) rep.feasible = false;
  };
  for (const LpConstraint& c : problem.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < problem.num_vars; ++j) lhs += c.coeffs[j] * x[j];
    switch (c.sense) {
      case RowSense::kLessEqual:
        record(lhs - c.rhs, c.rhs);
        break;
      case RowSense::kGreaterEqual:
        record(c.rhs - lhs, c.rhs);
        break;
      case RowSense::kEqual:
        record(std::abs(lhs - c.rhs), c.rhs);
        break;
    }
  }
  for (std::size_t j = 0; j < problem.num_vars; ++j) {
    const VarBounds& b = problem.bounds[j];
    if (std::isfinite(b.lower)) record(b.lower - x[j], b.lower);
    if (std::isfinite(b.upper)) record(x[j] - b.upper, b.upper);
    rep.objective += problem.objective[j] * x[j];
  }
  return rep;
}

void WriteLpText(std::ostream& out, const LpProblem& problem) {
  problem.Validate();
  out << "vars " << problem.num_vars << '\n';
  out << "max";
  for (double c : problem.objective) out << ' ' << FormatDouble(c);
  out << "\nbounds";
  for (const VarBounds& b : problem.bounds) {
    out << ' ' << FormatDouble(b.lower) << ':' << FormatDouble(b.upper);
  }
  out << '\n';
  for (const LpConstraint& c : problem.constraints) {
    for (double a : c.coeffs) out << FormatDouble(a) << ' ';
    switch (c.sense) {
      case RowSense::kLessEqual:
        out << "<=";
        break;
      case RowSense::kGreaterEqual:
        out << ">=";
        break;
      case RowSense::kEqual:
        out << '=';
        break;
    }
    out << ' ' << FormatDouble(c.rhs) << '\n';
  }
}

LpProblem ReadLpText(std::istream& in) {
  std::string line, word;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw std::invalid_argument(std::string("LP text: missing ") + what);
    }
  };
  next_line("vars line");
  std::istringstream vs(line);
  std::size_t n = 0;
  if (!(vs >> word >> n) || word != "vars") {
    throw std::invalid_argument("LP text: expected 'vars N'");
  }
  LpProblem problem(n);
  next_line("objective line");
  std::istringstream os(line);
  os >> word;
  if (word != "max") throw std::invalid_argument("LP text: expected 'max ...'");
  for (std::size_t j = 0; j < n; ++j) {
    if (!(os >> word)) throw std::invalid_argument("LP text: short objective");
    problem.objective[j] = ParseDouble(word);
  }
  next_line("bounds line");
  std::istringstream bs(line);
  bs >> word;
  if (word != "bounds") throw std::invalid_argument("LP text: expected 'bounds ...'");
  for (std::size_t j = 0; j < n; ++j) {
    if (!(bs >> word)) throw std::invalid_argument("LP text: short bounds");
    const auto colon = word.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("LP text: bad bound");
    problem.bounds[j] = {ParseDouble(std::string_view(word).substr(0, colon)),
                         ParseDouble(std::string_view(word).substr(colon + 1))};
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::vector<double> coeffs(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (!(rs >> word)) throw std::invalid_argument("LP text: short row");
      coeffs[j] = ParseDouble(word);
    }
    std::string sense_token, rhs_token;
    if (!(rs >> sense_token >> rhs_token)) {
      throw std::invalid_argument("LP text: row missing sense/rhs");
    }
    RowSense sense;
    if (sense_token == "<=") {
      sense = RowSense::kLessEqual;
    } else if (sense_token == ">=") {
      sense = RowSense::kGreaterEqual;
    } else if (sense_token == "=") {
      sense = RowSense::kEqual;
    } else {
      throw std::invalid_argument("LP text: unknown sense '" + sense_token + "'");
    }
    problem.AddConstraint(std::move(coeffs), sense, ParseDouble(rhs_token));
  }
  problem.Validate();
  return problem;
}

}  // namespace maxlin
