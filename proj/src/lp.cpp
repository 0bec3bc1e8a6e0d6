#include "ttcv/lp.hpp"

#include <stdexcept>

namespace ttcv {

namespace {

// Dense tableau. Column layout: original variables, then slack/surplus
// columns, then artificial columns; the final column is the rhs. basis_[r]
// names the column basic in row r. The objective row holds reduced costs:
// a column may enter while its reduced cost is positive.
class Tableau {
 public:
  Tableau(const LpProblem& p) : num_vars_(p.num_vars) {
    const size_t m = p.constraints.size();
    int num_aux = 0;
    for (const LpConstraint& c : p.constraints) {
      if (c.relation != LpRelation::Equal) ++num_aux;
    }
    first_artificial_ = num_vars_ + num_aux;
    cols_ = first_artificial_ + static_cast<int>(m);
    rows_.assign(m, std::vector<Rational>(cols_ + 1));
    basis_.assign(m, -1);
    int aux = num_vars_;
    for (size_t r = 0; r < m; ++r) {
      const LpConstraint& c = p.constraints[r];
      if (static_cast<int>(c.coeffs.size()) != num_vars_) {
        throw std::invalid_argument("lp: constraint width differs from num_vars");
      }
      bool flip = c.rhs.sign() < 0;
      for (int j = 0; j < num_vars_; ++j) {
        rows_[r][j] = flip ? -c.coeffs[j] : c.coeffs[j];
      }
      rows_[r][cols_] = flip ? -c.rhs : c.rhs;
      LpRelation rel = c.relation;
      if (flip && rel != LpRelation::Equal) {
        rel = rel == LpRelation::LessEq ? LpRelation::GreaterEq : LpRelation::LessEq;
      }
      if (rel == LpRelation::LessEq) {
        rows_[r][aux] = Rational(1);
        basis_[r] = aux++;
      } else if (rel == LpRelation::GreaterEq) {
        rows_[r][aux] = Rational(-1);
        ++aux;
      }
      if (basis_[r] == -1) {  // GreaterEq or Equal: artificial starts basic
        const int art = first_artificial_ + static_cast<int>(r);
        rows_[r][art] = Rational(1);
        basis_[r] = art;
      }
    }
  }

  // Runs one simplex phase to optimality (or unboundedness) for the given
  // objective over full columns; columns >= col_limit never enter.
  LpStatus optimize(const std::vector<Rational>& costs, int col_limit) {
    obj_.assign(cols_ + 1, Rational());
    for (int j = 0; j < std::min<int>(costs.size(), cols_); ++j) obj_[j] = costs[j];
    for (size_t r = 0; r < rows_.size(); ++r) eliminate_basic(static_cast<int>(r));
    while (true) {
      int enter = -1;
      for (int j = 0; j < col_limit; ++j) {
        if (obj_[j].sign() > 0) {
          enter = j;
          break;  // Bland: smallest improving index
        }
      }
      if (enter == -1) return LpStatus::Optimal;
      int leave = -1;
      Rational best;
      for (size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r][enter].sign() <= 0) continue;
        Rational ratio = rows_[r][cols_] / rows_[r][enter];
        if (leave == -1 || ratio < best ||
            (ratio == best && basis_[r] < basis_[leave])) {
          leave = static_cast<int>(r);
          best = ratio;
        }
      }
      if (leave == -1) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
  }

  // Degenerate artificials left basic after phase 1 are pivoted to a real
  // column when possible; rows that reduce to 0 = 0 are dropped outright.
  void purge_artificials() {
    for (size_t r = 0; r < rows_.size();) {
      if (basis_[r] < first_artificial_) {
        ++r;
        continue;
      }
      int col = -1;
      for (int j = 0; j < first_artificial_; ++j) {
        if (rows_[r][j].sign() != 0) {
          col = j;
          break;
        }
      }
      if (col != -1) {
        pivot(static_cast<int>(r), col);
        ++r;
      } else {
        rows_.erase(rows_.begin() + r);
        basis_.erase(basis_.begin() + r);
      }
    }
  }

  Rational objective_value() const { return obj_.back(); }

  std::vector<Rational> primal_values() const {
    std::vector<Rational> x(num_vars_, Rational());
    for (size_t r = 0; r < rows_.size(); ++r) {
      if (basis_[r] < num_vars_) x[basis_[r]] = rows_[r][cols_];
    }
    return x;
  }

  int first_artificial() const { return first_artificial_; }
  long long pivots = 0;

 private:
  void eliminate_basic(int r) {
    const Rational coeff = obj_[basis_[r]];
    if (coeff.sign() == 0) return;
    for (int j = 0; j <= cols_; ++j) {
      if (rows_[r][j].sign() != 0) obj_[j] -= coeff * rows_[r][j];
    }
    // obj_ rhs cell now carries -z; objective_value() negates when read.
  }

  void pivot(int r, int c) {
    ++pivots;
    const Rational inv = Rational(1) / rows_[r][c];
    for (int j = 0; j <= cols_; ++j) rows_[r][j] *= inv;
    for (size_t k = 0; k < rows_.size(); ++k) {
      if (static_cast<int>(k) == r || rows_[k][c].sign() == 0) continue;
      const Rational f = rows_[k][c];
      for (int j = 0; j <= cols_; ++j) {
        if (rows_[r][j].sign() != 0) rows_[k][j] -= f * rows_[r][j];
      }
    }
    if (obj_[c].sign() != 0) {
      const Rational f = obj_[c];
      for (int j = 0; j <= cols_; ++j) {
        if (rows_[r][j].sign() != 0) obj_[j] -= f * rows_[r][j];
      }
    }
    basis_[r] = c;
  }

  int num_vars_;
  int first_artificial_;
  int cols_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<Rational> obj_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution lp_maximize(const LpProblem& problem) {
  if (static_cast<int>(problem.objective.size()) != problem.num_vars) {
    throw std::invalid_argument("lp: objective width differs from num_vars");
  }
  Tableau t(problem);
  // Phase 1: maximize -(sum of artificials); feasible iff the optimum is 0.
  std::vector<Rational> phase1(t.first_artificial() + problem.constraints.size(), Rational());
  for (size_t j = t.first_artificial(); j < phase1.size(); ++j) phase1[j] = Rational(-1);
  LpStatus s1 = t.optimize(phase1, static_cast<int>(phase1.size()));
  LpSolution sol;
  sol.pivots = t.pivots;
  if (s1 != LpStatus::Optimal || !(-t.objective_value()).is_zero()) {
    // -z is stored in the rhs cell; a nonzero phase-1 optimum means some
    // artificial is stuck positive.
    sol.status = LpStatus::Infeasible;
    if (s1 == LpStatus::Unbounded) sol.status = LpStatus::Unbounded;
    return sol;
  }
  t.purge_artificials();
  LpStatus s2 = t.optimize(problem.objective, t.first_artificial());
  sol.pivots = t.pivots;
  sol.status = s2;
  if (s2 == LpStatus::Optimal) {
    sol.objective_value = -t.objective_value();
    sol.x = t.primal_values();
  }
  return sol;
}

}  // namespace ttcv
