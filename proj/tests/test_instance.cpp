#include "doctest.h"

#include <fstream>
#include <sstream>

#include "bexplore/error.hpp"
#include "bexplore/instance.hpp"
#include "oracles.hpp"

using namespace bexplore;

namespace {

std::string example1_path() {
  return std::string(BEXPLORE_DATA_DIR) + "/example1.json";
}

Instance example1() { return load_instance_file(example1_path()); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("example 1 loads with the published utility table") {
  Instance inst = example1();
  CHECK(inst.num_states() == 2);
  CHECK(inst.num_types() == 2);
  CHECK(inst.num_actions() == 2);
  CHECK(inst.utility(0, 1, 0) == 4);
  CHECK(inst.utility(0, 0, 0) == 3);
  CHECK(inst.utility(1, 0, 0) == 2);
  CHECK(inst.utility(1, 1, 0) == 0);
  CHECK(inst.utility(0, 0, 1) == 2);
  CHECK(inst.utility(1, 1, 1) == 4);
  CHECK(inst.state_prior(0) == Rat(1, 2));
  CHECK(inst.type_prob(1) == Rat(1, 2));
}

TEST_CASE("prior that does not sum to one is rejected with the sum") {
  const std::string doc = R"({
    "states": ["w0", "w1"], "types": ["t0"], "actions": ["a0"],
    "state_prior": {"w0": "1/2", "w1": "1/3"},
    "type_dist": {"t0": 1},
    "utility": [[[0, 0]]]
  })";
  try {
    load_instance(doc);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("5/6") != std::string::npos);
    CHECK(e.path() == "state_prior");
  }
}

TEST_CASE("degenerate one-by-one-by-one instance is valid") {
  const std::string doc = R"({
    "states": ["w0"], "types": ["t0"], "actions": ["a0"],
    "state_prior": {"w0": 1}, "type_dist": {"t0": "1"},
    "utility": [[[0]]]
  })";
  Instance inst = load_instance(doc);
  CHECK(inst.num_states() == 1);
  CHECK(expected_utility_prior(inst, 0, 0) == 0);
}

TEST_CASE("structural document errors carry field paths") {
  CHECK_THROWS_AS(load_instance("{"), ValidationError);
  CHECK_THROWS_AS(load_instance("[1,2]"), ValidationError);
  const std::string dup = R"({
    "states": ["w0"], "types": ["t0", "t0"], "actions": ["a0"],
    "state_prior": {"w0": 1}, "type_dist": {"t0": "1/2"},
    "utility": [[[0]], [[0]]]
  })";
  CHECK_THROWS_WITH_AS(load_instance(dup),
                       "types: duplicate label \"t0\"", ValidationError);
  const std::string missing_cell = R"({
    "states": ["w0", "w1"], "types": ["t0"], "actions": ["a0"],
    "state_prior": {"w0": "1/2", "w1": "1/2"}, "type_dist": {"t0": 1},
    "utility": [[[1]]]
  })";
  try {
    load_instance(missing_cell);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.path() == "utility[0][0]");
  }
  const std::string zero_weight = R"({
    "states": ["w0"], "types": ["t0", "t1"], "actions": ["a0"],
    "state_prior": {"w0": 1}, "type_dist": {"t0": 1, "t1": 0},
    "utility": [[[0]], [[0]]]
  })";
  CHECK_THROWS_AS(load_instance(zero_weight), ValidationError);
  const std::string float_cell = R"({
    "states": ["w0"], "types": ["t0"], "actions": ["a0"],
    "state_prior": {"w0": 1}, "type_dist": {"t0": 1},
    "utility": [[[0.5]]]
  })";
  CHECK_THROWS_AS(load_instance(float_cell), ValidationError);
}

TEST_CASE("round trip is bit-exact") {
  const std::string text = slurp(example1_path());
  Instance first = load_instance(text);
  const std::string serialized = serialize_instance(first);
  Instance second = load_instance(serialized);
  CHECK(first == second);
  CHECK(serialize_instance(second) == serialized);
}

TEST_CASE("expected utility under the prior") {
  Instance inst = example1();
  CHECK(expected_utility_prior(inst, "t0", "a0") == Rat(5, 2));
  // action 0 is preferred initially
  CHECK(expected_utility_prior(inst, "t0", "a1") == 2);
  CHECK(expected_utility_prior(inst, "t1", "a0") == Rat(5, 2));
  CHECK(expected_utility_prior(inst, "t1", "a1") == 2);
  CHECK_THROWS_AS(expected_utility_prior(inst, "t9", "a0"), ValidationError);

  const std::string single = R"({
    "states": ["w0"], "types": ["t0"], "actions": ["a0"],
    "state_prior": {"w0": 1}, "type_dist": {"t0": 1},
    "utility": [[["7/3"]]]
  })";
  Instance s = load_instance(single);
  CHECK(expected_utility_prior(s, 0, 0) == Rat(7, 3));
}

TEST_CASE("expected utility is linear in the prior") {
  // mix two priors and compare against the mixture of expectations
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    Instance a = oracles::random_instance(gen, 3, 2, 2);
    std::vector<Rat> p1 = oracles::random_distribution(gen, 3);
    std::vector<Rat> p2 = oracles::random_distribution(gen, 3);
    const Rat lambda(1, 3);
    std::vector<Rat> mix(3);
    for (int w = 0; w < 3; ++w) {
      mix[w] = lambda * p1[w] + (1 - lambda) * p2[w];
    }
    std::vector<Rat> util;
    for (int t = 0; t < 2; ++t) {
      for (int ac = 0; ac < 2; ++ac) {
        for (int w = 0; w < 3; ++w) util.push_back(a.utility(t, ac, w));
      }
    }
    std::vector<Rat> tdist{a.type_prob(0), a.type_prob(1)};
    Instance i1(a.states(), a.types(), a.actions(), p1, tdist, util);
    Instance i2(a.states(), a.types(), a.actions(), p2, tdist, util);
    Instance im(a.states(), a.types(), a.actions(), mix, tdist, util);
    for (int t = 0; t < 2; ++t) {
      for (int ac = 0; ac < 2; ++ac) {
        CHECK(expected_utility_prior(im, t, ac) ==
              lambda * expected_utility_prior(i1, t, ac) +
                  (1 - lambda) * expected_utility_prior(i2, t, ac));
      }
    }
  }
}

TEST_CASE("menu enumeration is lexicographic over the type list") {
  Instance inst = example1();
  std::vector<Menu> menus = enumerate_menus(inst);
  REQUIRE(menus.size() == 4);
  CHECK(menus[0].action_of_type == std::vector<int>{0, 0});
  CHECK(menus[1].action_of_type == std::vector<int>{0, 1});
  CHECK(menus[2].action_of_type == std::vector<int>{1, 0});
  CHECK(menus[3].action_of_type == std::vector<int>{1, 1});

  std::mt19937_64 gen(3);
  Instance one_type = oracles::random_instance(gen, 2, 1, 3);
  CHECK(enumerate_menus(one_type).size() == 3);
}

TEST_CASE("menu enumeration matches a nested-loop oracle on 3x3") {
  std::mt19937_64 gen(5);
  Instance inst = oracles::random_instance(gen, 2, 3, 3);
  std::vector<Menu> menus = enumerate_menus(inst);
  REQUIRE(menus.size() == 27);
  std::size_t k = 0;
  for (int a0 = 0; a0 < 3; ++a0) {
    for (int a1 = 0; a1 < 3; ++a1) {
      for (int a2 = 0; a2 < 3; ++a2) {
        CHECK(menus[k].action_of_type == std::vector<int>{a0, a1, a2});
        ++k;
      }
    }
  }
}

TEST_CASE("menu enumeration respects the cap") {
  std::mt19937_64 gen(5);
  Instance inst = oracles::random_instance(gen, 2, 3, 3);
  CHECK_THROWS_AS(enumerate_menus(inst, 10), ValidationError);
}

TEST_CASE("menu outcome distribution merges identical pairs") {
  Instance inst = example1();
  const Menu all_zero{{0, 0}};
  OutcomeDistribution d0 = menu_outcome_distribution(inst, all_zero, 0);
  REQUIRE(d0.atoms.size() == 2);
  CHECK(d0.atoms[0].action == 0);
  CHECK(d0.atoms[0].reward == 2);
  CHECK(d0.atoms[0].prob == Rat(1, 2));
  CHECK(d0.atoms[1].reward == 3);
  CHECK(d0.atoms[1].prob == Rat(1, 2));
  // the same distribution in both states: the paper's private-types point
  OutcomeDistribution d1 = menu_outcome_distribution(inst, all_zero, 1);
  CHECK(d0 == d1);

  const std::string one_type = R"({
    "states": ["w0"], "types": ["t0"], "actions": ["a0", "a1"],
    "state_prior": {"w0": 1}, "type_dist": {"t0": 1},
    "utility": [[["1/3"], ["2/3"]]]
  })";
  Instance s = load_instance(one_type);
  OutcomeDistribution point = menu_outcome_distribution(s, Menu{{1}}, 0);
  REQUIRE(point.atoms.size() == 1);
  CHECK(point.atoms[0].action == 1);
  CHECK(point.atoms[0].reward == Rat(2, 3));
  CHECK(point.atoms[0].prob == 1);
}

TEST_CASE("outcome distributions sum to one and match unmerged enumeration") {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 25; ++rep) {
    Instance inst = oracles::random_instance(gen, 3, 3, 2);
    for (const Menu& m : enumerate_menus(inst)) {
      for (int w = 0; w < inst.num_states(); ++w) {
        OutcomeDistribution d = menu_outcome_distribution(inst, m, w);
        Rat total = 0;
        for (const auto& atom : d.atoms) {
          CHECK(atom.prob > 0);
          total += atom.prob;
        }
        CHECK(total == 1);
        // unmerged oracle: sum type masses per (action, reward) pair
        for (const auto& atom : d.atoms) {
          Rat mass = 0;
          for (int t = 0; t < inst.num_types(); ++t) {
            if (m.action_of_type[t] == atom.action &&
                inst.utility(t, atom.action, w) == atom.reward) {
              mass += inst.type_prob(t);
            }
          }
          CHECK(mass == atom.prob);
        }
      }
    }
  }
}
