#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bexplore/error.hpp"
#include "bexplore/lp.hpp"
#include "oracles.hpp"

using namespace bexplore;

namespace {

LinearProgram upper_bounded_var() {
  // maximize x0 s.t. x0 <= 1, x0 >= 0
  LinearProgram lp;
  lp.num_vars = 1;
  lp.objective = {Rat(1)};
  lp.constraints.push_back({{{0, Rat(-1)}}, Relation::GreaterEqual, Rat(-1)});
  lp.constraints.push_back({{{0, Rat(1)}}, Relation::GreaterEqual, Rat(0)});
  return lp;
}

}  // namespace

TEST_CASE("single bounded variable") {
  LpOutcome out = solve(upper_bounded_var());
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(out.value == 1);
  CHECK(out.point[0] == 1);
}

TEST_CASE("contradictory bounds are infeasible") {
  LinearProgram lp;
  lp.num_vars = 1;
  lp.objective = {Rat(1)};
  lp.constraints.push_back({{{0, Rat(1)}}, Relation::GreaterEqual, Rat(1)});
  lp.constraints.push_back({{{0, Rat(-1)}}, Relation::GreaterEqual, Rat(0)});
  CHECK(solve(lp).status == LpStatus::Infeasible);
}

TEST_CASE("free maximization is unbounded") {
  LinearProgram lp;
  lp.num_vars = 1;
  lp.objective = {Rat(1)};
  lp.constraints.push_back({{{0, Rat(1)}}, Relation::GreaterEqual, Rat(0)});
  CHECK(solve(lp).status == LpStatus::Unbounded);

  // free variable, no rows at all
  LinearProgram free;
  free.num_vars = 1;
  free.objective = {Rat(-1)};
  CHECK(solve(free).status == LpStatus::Unbounded);
}

TEST_CASE("simplex row with unit objective") {
  // maximize x2 over the probability simplex
  LinearProgram lp;
  lp.num_vars = 3;
  lp.objective = {Rat(0), Rat(0), Rat(1)};
  LpConstraint sum;
  sum.coeffs = {{0, Rat(1)}, {1, Rat(1)}, {2, Rat(1)}};
  sum.rel = Relation::Equal;
  sum.rhs = 1;
  lp.constraints.push_back(sum);
  for (int v = 0; v < 3; ++v) {
    lp.constraints.push_back({{{v, Rat(1)}}, Relation::GreaterEqual, Rat(0)});
  }
  LpOutcome out = max_coordinate(lp, 2);
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(out.value == 1);
  CHECK(out.point == std::vector<Rat>{Rat(0), Rat(0), Rat(1)});
  CHECK_THROWS_AS(max_coordinate(lp, 5), ValidationError);
}

TEST_CASE("equality rows and negative optima") {
  // maximize -x - y s.t. x + y = 3/2, x,y >= 0
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {Rat(-1), Rat(-1)};
  lp.constraints.push_back(
      {{{0, Rat(1)}, {1, Rat(1)}}, Relation::Equal, Rat(3, 2)});
  lp.constraints.push_back({{{0, Rat(1)}}, Relation::GreaterEqual, Rat(0)});
  lp.constraints.push_back({{{1, Rat(1)}}, Relation::GreaterEqual, Rat(0)});
  LpOutcome out = solve(lp);
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(out.value == Rat(-3, 2));
}

TEST_CASE("free variables split into positive and negative parts") {
  // maximize -x s.t. x >= -5 (optimum 5 at x = -5)
  LinearProgram lp;
  lp.num_vars = 1;
  lp.objective = {Rat(-1)};
  lp.constraints.push_back({{{0, Rat(1)}}, Relation::GreaterEqual, Rat(-5)});
  LpOutcome out = solve(lp);
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(out.value == 5);
  CHECK(out.point[0] == -5);
}

TEST_CASE("optimal points satisfy every constraint exactly") {
  std::mt19937_64 gen(101);
  int optimal_seen = 0;
  for (int rep = 0; rep < 200; ++rep) {
    LinearProgram lp = oracles::random_boxed_lp(gen, 2 + rep % 3, 3 + rep % 4);
    LpOutcome out = solve(lp);
    if (out.status != LpStatus::Optimal) continue;
    optimal_seen += 1;
    CHECK(satisfies(lp, out.point));
    Rat value = 0;
    for (int v = 0; v < lp.num_vars; ++v) {
      value += lp.objective[v] * out.point[v];
    }
    CHECK(value == out.value);
  }
  CHECK(optimal_seen > 50);
}

TEST_CASE("status and optimum agree with vertex enumeration") {
  std::mt19937_64 gen(2024);
  int infeasible_seen = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + rep % 3;
    LinearProgram lp = oracles::random_boxed_lp(gen, n, 4 + rep % 3);
    LpOutcome mine = solve(lp);
    oracles::OracleResult expected = oracles::vertex_enumeration_oracle(lp);
    REQUIRE(mine.status == expected.status);
    if (mine.status == LpStatus::Optimal) {
      CHECK(mine.value == expected.value);
    } else {
      infeasible_seen += 1;
    }
  }
  CHECK(infeasible_seen > 5);
}

TEST_CASE("identical inputs give identical outputs") {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 20; ++rep) {
    LinearProgram lp = oracles::random_boxed_lp(gen, 4, 6);
    LpOutcome a = solve(lp);
    LpOutcome b = solve(lp);
    CHECK(a.status == b.status);
    if (a.status == LpStatus::Optimal) {
      CHECK(a.value == b.value);
      CHECK(a.point == b.point);
    }
  }
}

TEST_CASE("dump renders rows") {
  const std::string text = dump_lp(upper_bounded_var());
  CHECK(text.find("maximize") != std::string::npos);
  CHECK(text.find(">=") != std::string::npos);
}
