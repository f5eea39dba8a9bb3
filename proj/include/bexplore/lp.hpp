#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bexplore/rational.hpp"

namespace bexplore {

enum class Relation { GreaterEqual, Equal };

struct LpConstraint {
  std::vector<std::pair<int, Rat>> coeffs;  // (variable index, coefficient)
  Relation rel = Relation::GreaterEqual;
  Rat rhs = 0;
};

// Maximize objective . x subject to the constraint rows. Variables are
// free unless the rows say otherwise; the explorability LPs always carry
// explicit x >= 0 rows.
struct LinearProgram {
  int num_vars = 0;
  std::vector<Rat> objective;
  std::vector<LpConstraint> constraints;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  Rat value = 0;              // when optimal
  std::vector<Rat> point;     // when optimal; satisfies every row exactly
};

// Exact rational-pivot simplex, Bland's rule throughout; the returned
// point is a basic solution under canonical variable order, so identical
// inputs give identical outputs.
LpOutcome solve(const LinearProgram& lp);

// solve() with the objective replaced by the unit vector on coordinate i.
LpOutcome max_coordinate(const LinearProgram& lp, int var);

// Substitutes a candidate point into every row; true iff all hold exactly.
bool satisfies(const LinearProgram& lp, const std::vector<Rat>& point);

std::string dump_lp(const LinearProgram& lp);

}  // namespace bexplore
