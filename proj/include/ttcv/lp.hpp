#pragma once

#include <vector>

#include "ttcv/rational.hpp"

namespace ttcv {

// Small dense linear programs over exact rationals. Variables are implicitly
// nonnegative; every coefficient, bound, and solution value is exact.
enum class LpRelation { LessEq, GreaterEq, Equal };

struct LpConstraint {
  std::vector<Rational> coeffs;  // one per variable
  LpRelation relation;
  Rational rhs;
};

struct LpProblem {
  int num_vars = 0;
  std::vector<Rational> objective;  // maximized
  std::vector<LpConstraint> constraints;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status;
  Rational objective_value;  // meaningful for Optimal
  std::vector<Rational> x;   // original variables, size num_vars
  long long pivots = 0;
};

// Two-phase primal simplex with Bland's rule (terminates on degenerate
// problems; no numerical tolerance exists or is needed).
LpSolution lp_maximize(const LpProblem& problem);

}  // namespace ttcv
