#include "bexplore/lp.hpp"

#include <algorithm>
#include <sstream>

#include "bexplore/error.hpp"

namespace bexplore {

namespace {

void check_well_formed(const LinearProgram& lp) {
  if (lp.num_vars <= 0) throw ValidationError("lp", "no variables");
  if (static_cast<int>(lp.objective.size()) != lp.num_vars) {
    throw ValidationError("lp.objective", "wrong size");
  }
  for (const auto& c : lp.constraints) {
    for (const auto& [idx, _] : c.coeffs) {
      if (idx < 0 || idx >= lp.num_vars) {
        throw ValidationError("lp.constraints", "variable index out of range");
      }
    }
  }
}

// Dense tableau in standard form: maximize cost . y, A y <= b after adding
// slacks, y >= 0. Bland's rule on both phases.
class Simplex {
 public:
  Simplex(std::vector<std::vector<Rat>> rows, std::vector<Rat> rhs,
          std::vector<Rat> cost)
      : a_(std::move(rows)), rhs_(std::move(rhs)), cost_(std::move(cost)) {
    m_ = static_cast<int>(a_.size());
    n_struct_ = m_ ? static_cast<int>(a_[0].size())
                   : static_cast<int>(cost_.size());
    // slack columns
    for (int i = 0; i < m_; ++i) {
      a_[i].resize(n_struct_ + m_, Rat(0));
      a_[i][n_struct_ + i] = 1;
    }
    n_ = n_struct_ + m_;
    cost_.resize(n_, Rat(0));
    basis_.resize(m_);
    // artificials for rows with negative rhs
    for (int i = 0; i < m_; ++i) {
      if (rhs_[i] < 0) {
        for (auto& v : a_[i]) v = -v;
        rhs_[i] = -rhs_[i];
        artificial_rows_.push_back(i);
      } else {
        basis_[i] = n_struct_ + i;
      }
    }
    first_artificial_ = n_;
    for (int k = 0; k < static_cast<int>(artificial_rows_.size()); ++k) {
      int row = artificial_rows_[k];
      for (int i = 0; i < m_; ++i) a_[i].push_back(Rat(i == row ? 1 : 0));
      basis_[row] = n_ + k;
    }
    n_ += static_cast<int>(artificial_rows_.size());
    cost_.resize(n_, Rat(0));
  }

  // Returns false when the program is infeasible.
  bool phase1() {
    if (artificial_rows_.empty()) {
      init_objective(cost_);
      return true;
    }
    std::vector<Rat> phase_cost(n_, Rat(0));
    for (int j = first_artificial_; j < n_; ++j) phase_cost[j] = -1;
    init_objective(phase_cost);
    run(n_);
    if (zval_ != 0) return false;
    drive_out_artificials();
    init_objective(cost_);
    return true;
  }

  // Returns false when unbounded. Artificial columns are never candidates.
  bool phase2() { return run(first_artificial_); }

  Rat objective_value() const { return zval_; }

  std::vector<Rat> structural_values() const {
    std::vector<Rat> y(n_struct_, Rat(0));
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_struct_) y[basis_[i]] = rhs_[i];
    }
    return y;
  }

 private:
  void init_objective(const std::vector<Rat>& cost) {
    z_.assign(n_, Rat(0));
    zval_ = 0;
    for (int j = 0; j < n_; ++j) z_[j] = -cost[j];
    for (int i = 0; i < m_; ++i) {
      const Rat& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (int j = 0; j < n_; ++j) z_[j] += cb * a_[i][j];
      zval_ += cb * rhs_[i];
    }
  }

  void pivot(int row, int col) {
    const Rat inv = 1 / a_[row][col];
    for (auto& v : a_[row]) v *= inv;
    rhs_[row] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == row || a_[i][col] == 0) continue;
      const Rat f = a_[i][col];
      for (int j = 0; j < n_; ++j) a_[i][j] -= f * a_[row][j];
      a_[i][col] = 0;  // cancel exactly
      rhs_[i] -= f * rhs_[row];
    }
    if (z_[col] != 0) {
      const Rat f = z_[col];
      for (int j = 0; j < n_; ++j) z_[j] -= f * a_[row][j];
      z_[col] = 0;
      zval_ -= f * rhs_[row];
    }
    basis_[row] = col;
  }

  // Bland: entering = lowest column with negative objective-row entry,
  // leaving = min ratio with ties broken by lowest basis column.
  bool run(int candidate_limit) {
    while (true) {
      int enter = -1;
      for (int j = 0; j < candidate_limit; ++j) {
        if (z_[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rat best_ratio;
      for (int i = 0; i < m_; ++i) {
        if (a_[i][enter] <= 0) continue;
        Rat ratio = rhs_[i] / a_[i][enter];
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  // Basic artificials sit at zero after a feasible phase 1; replace them by
  // structural/slack columns, or drop the (redundant) row entirely.
  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < first_artificial_) continue;
      int col = -1;
      for (int j = 0; j < first_artificial_; ++j) {
        if (a_[i][j] != 0) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        a_.erase(a_.begin() + i);
        rhs_.erase(rhs_.begin() + i);
        basis_.erase(basis_.begin() + i);
        --m_;
        --i;
      }
    }
  }

  std::vector<std::vector<Rat>> a_;
  std::vector<Rat> rhs_;
  std::vector<Rat> cost_;
  std::vector<Rat> z_;
  Rat zval_ = 0;
  std::vector<int> basis_;
  std::vector<int> artificial_rows_;
  int m_ = 0, n_struct_ = 0, n_ = 0, first_artificial_ = 0;
};

// A row of the shape k*x_i >= 0 (k > 0) is a sign restriction, not a
// tableau row.
bool is_nonneg_row(const LpConstraint& c) {
  return c.rel == Relation::GreaterEqual && c.coeffs.size() == 1 &&
         c.coeffs[0].second > 0 && c.rhs == 0;
}

}  // namespace

LpOutcome solve(const LinearProgram& lp) {
  check_well_formed(lp);

  std::vector<bool> nonneg(lp.num_vars, false);
  for (const auto& c : lp.constraints) {
    if (is_nonneg_row(c)) nonneg[c.coeffs[0].first] = true;
  }

  // Column layout: one column per nonnegative variable, a (plus, minus)
  // pair per free variable. Canonical variable order is preserved.
  std::vector<int> col_of(lp.num_vars);
  std::vector<int> neg_col_of(lp.num_vars, -1);
  int ncols = 0;
  for (int v = 0; v < lp.num_vars; ++v) {
    col_of[v] = ncols++;
    if (!nonneg[v]) neg_col_of[v] = ncols++;
  }

  auto expand = [&](const std::vector<std::pair<int, Rat>>& coeffs) {
    std::vector<Rat> row(ncols, Rat(0));
    for (const auto& [v, coef] : coeffs) {
      row[col_of[v]] += coef;
      if (neg_col_of[v] >= 0) row[neg_col_of[v]] -= coef;
    }
    return row;
  };

  // >= rows become -a.y <= -b; equalities become two opposing inequalities.
  std::vector<std::vector<Rat>> rows;
  std::vector<Rat> rhs;
  for (const auto& c : lp.constraints) {
    if (is_nonneg_row(c)) continue;
    std::vector<Rat> row = expand(c.coeffs);
    if (c.rel == Relation::Equal) {
      rows.push_back(row);
      rhs.push_back(c.rhs);
    }
    for (auto& v : row) v = -v;
    rows.push_back(std::move(row));
    rhs.push_back(-c.rhs);
  }

  std::vector<Rat> cost(ncols, Rat(0));
  for (int v = 0; v < lp.num_vars; ++v) {
    cost[col_of[v]] += lp.objective[v];
    if (neg_col_of[v] >= 0) cost[neg_col_of[v]] -= lp.objective[v];
  }

  Simplex simplex(std::move(rows), std::move(rhs), std::move(cost));
  LpOutcome out;
  if (!simplex.phase1()) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  if (!simplex.phase2()) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.value = simplex.objective_value();
  std::vector<Rat> y = simplex.structural_values();
  out.point.resize(lp.num_vars);
  for (int v = 0; v < lp.num_vars; ++v) {
    out.point[v] = y[col_of[v]];
    if (neg_col_of[v] >= 0) out.point[v] -= y[neg_col_of[v]];
  }
  return out;
}

LpOutcome max_coordinate(const LinearProgram& lp, int var) {
  if (var < 0 || var >= lp.num_vars) {
    throw ValidationError("lp", "objective index out of range");
  }
  LinearProgram copy = lp;
  copy.objective.assign(lp.num_vars, Rat(0));
  copy.objective[var] = 1;
  return solve(copy);
}

bool satisfies(const LinearProgram& lp, const std::vector<Rat>& point) {
  if (static_cast<int>(point.size()) != lp.num_vars) return false;
  for (const auto& c : lp.constraints) {
    Rat lhs = 0;
    for (const auto& [v, coef] : c.coeffs) lhs += coef * point[v];
    if (c.rel == Relation::Equal ? lhs != c.rhs : lhs < c.rhs) return false;
  }
  return true;
}

std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream os;
  os << "maximize";
  for (int v = 0; v < lp.num_vars; ++v) {
    if (lp.objective[v] != 0) {
      os << " + " << rat_to_string(lp.objective[v]) << "*x" << v;
    }
  }
  os << "\n";
  for (const auto& c : lp.constraints) {
    os << " ";
    for (const auto& [v, coef] : c.coeffs) {
      os << " + " << rat_to_string(coef) << "*x" << v;
    }
    os << (c.rel == Relation::Equal ? " = " : " >= ") << rat_to_string(c.rhs)
       << "\n";
  }
  return os.str();
}

}  // namespace bexplore
