#ifndef MAXLIN_LP_H_
#define MAXLIN_LP_H_

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace maxlin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { kLessEqual, kGreaterEqual, kEqual };

struct LpConstraint {
  std::vector<double> coeffs;  // dense, one entry per variable
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
};

struct VarBounds {
  double lower = 0.0;
  double upper = kInf;
};

// maximize <objective, x> subject to the constraints and variable bounds.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
  std::vector<VarBounds> bounds;  // defaults to [0, inf) per variable

  explicit LpProblem(std::size_t n = 0)
      : num_vars(n), objective(n, 0.0), bounds(n) {}

  void AddConstraint(std::vector<double> coeffs, RowSense sense, double rhs);
  // Throws std::invalid_argument on ragged rows, infinite rhs or lower > upper.
  void Validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string_view ToString(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;       // present iff optimal
  double objective_value = 0;  // meaningful iff optimal
  // Shadow price d(objective)/d(rhs) of each original constraint (optimal only).
  std::vector<double> duals;
  // Largest reduced cost over nonbasic canonical columns at termination.
  double max_reduced_cost = 0;
  std::size_t iterations = 0;
};

struct SolverOptions {
  double tol = 1e-9;
  // 0 means 50 * (rows + cols) of the canonical problem.
  std::size_t max_iterations = 0;
  std::size_t refactor_interval = 50;
  // Consecutive non-improving pivots before switching to Bland's rule.
  std::size_t bland_after = 200;
};

// Canonical form: maximize <cost, z> + offset s.t. A z = rhs, z >= 0, rhs >= 0.
// A is stored column-compressed.
struct StandardForm {
  enum class VarKind { kShifted, kMirrored, kSplit };
  // x = offset + z[col] (shifted), offset - z[col] (mirrored) or
  // z[col] - z[col_neg] (split).
  struct VarMap {
    VarKind kind = VarKind::kShifted;
    std::size_t col = 0;
    std::size_t col_neg = 0;
    double offset = 0.0;
  };

  std::size_t num_rows = 0;
  std::size_t num_cols = 0;
  std::vector<std::size_t> col_start;  // size num_cols + 1
  std::vector<std::size_t> row_index;
  std::vector<double> values;
  std::vector<double> cost;
  std::vector<double> rhs;
  double objective_offset = 0.0;

  std::vector<VarMap> var_map;
  // Canonical row i is row_sign[i] times the original row (or bound row).
  std::vector<double> row_sign;
  // Number of canonical rows that come from original constraints; upper-bound
  // rows follow them.
  std::size_t num_constraint_rows = 0;
  // Column of a slack with coefficient +1 in each row, or npos.
  std::vector<std::size_t> unit_slack;
  std::size_t num_structural = 0;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<double> Reconstruct(std::span<const double> z) const;
};

StandardForm ToStandardForm(const LpProblem& problem);

// Two-phase revised simplex on ToStandardForm(problem).
LpSolution Solve(const LpProblem& problem, const SolverOptions& options = {});

// The LP dual of a problem whose variables are all nonnegative, nonpositive or
// free: minimize <b, u> becomes maximize <-b, u>, one row per primal variable.
// Throws std::invalid_argument for other bound shapes.
LpProblem Dualize(const LpProblem& primal);

// Solves Dualize(primal) and recovers the primal point from its shadow
// prices. Status is mapped back to the primal; when the dual is infeasible
// the primal is solved directly to tell unbounded from infeasible.
LpSolution SolveViaDual(const LpProblem& primal, const SolverOptions& options = {});

struct VerifyReport {
  bool feasible = false;
  double max_violation = 0.0;  // absolute, over rows and bounds
  double objective = 0.0;
};

// Pure feasibility check. A row or bound is satisfied when its violation is
// at most tol * (1 + |rhs|). Throws std::invalid_argument if x has the wrong
// size.
VerifyReport VerifySolution(const LpProblem& problem, std::span<const double> x,
                            double tol = 1e-9);

// Plain-text dump: `vars N`, `max c_1 ... c_N`, `bounds l_1:u_1 ...`, then one
// `a_1 ... a_N <=|>=|= rhs` line per constraint.
void WriteLpText(std::ostream& out, const LpProblem& problem);
LpProblem ReadLpText(std::istream& in);

}  // namespace maxlin

#endif  // MAXLIN_LP_H_
