#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "bexplore/error.hpp"
#include "bexplore/maxexplore.hpp"
#include "oracles.hpp"

using namespace bexplore;

namespace {

Instance example1() {
  return load_instance_file(std::string(BEXPLORE_DATA_DIR) + "/example1.json");
}

Instance one_action() {
  return load_instance(R"({
    "states": ["w0", "w1"], "types": ["t0"], "actions": ["a0"],
    "state_prior": {"w0": "1/2", "w1": "1/2"}, "type_dist": {"t0": 1},
    "utility": [[["1", "2"]]]
  })");
}

}  // namespace

TEST_CASE("deterministic policies need a single round") {
  Instance inst = one_action();
  PublicAnalysis a = analyze_public(inst);
  CHECK(required_length_public(inst, a, 0) == 1);
}

TEST_CASE("the ceiling-of-reciprocal length rule") {
  // counts of one reproduce the public rule
  CHECK(length_from_bounds({1, 1}, {Rat(2, 7), Rat(5, 7)}) == 4);
  CHECK(length_from_bounds({1}, {Rat(1)}) == 1);
  // the private rule weights each item by its sample bound
  CHECK(length_from_bounds({163, 1}, {Rat(1, 3), Rat(2, 3)}) == 489);
}

TEST_CASE("example 1 lengths cover the smallest mixture probability") {
  Instance inst = example1();
  PublicAnalysis a = analyze_public(inst);
  for (int t = 0; t < 2; ++t) {
    const long length = required_length_public(inst, a, t);
    Rat min_positive = 1;
    for (const auto& phase : a.phases) {
      for (const auto& row : phase.per_type[t].pimax.table) {
        for (const Rat& p : row) {
          if (p > 0 && p < min_positive) min_positive = p;
        }
      }
    }
    CHECK(Rat(length) * min_positive >= 1);
    CHECK(length == rat_ceil_long(1 / min_positive));
  }
}

TEST_CASE("floors and a residual produce the expected multisets") {
  // {1/2, 1/4, 1/4} at length 4: always two copies of the first item
  const std::vector<Rat> probs{Rat(1, 2), Rat(1, 4), Rat(1, 4)};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    ExploreSequence seq = max_explore(probs, 4, rng);
    std::vector<int> sorted = seq.items;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 0, 1, 2});
  }
}

TEST_CASE("point masses give constant sequences") {
  Rng rng(5);
  ExploreSequence seq = max_explore({Rat(1)}, 3, rng);
  CHECK(seq.items == std::vector<int>{0, 0, 0});
}

TEST_CASE("exact position marginals via full enumeration") {
  // {2/3, 1/3} at length 4: floors give {0,0,1}, one residual draw
  const std::vector<Rat> probs{Rat(2, 3), Rat(1, 3)};
  const long length = 4;
  const std::vector<int> multiset = maxexplore_multiset(probs, length);
  CHECK(multiset == std::vector<int>{0, 0, 1});
  const std::vector<Rat> weights = maxexplore_residual_weights(probs, length);
  Rat weight_total = 0;
  for (const Rat& w : weights) weight_total += w;
  REQUIRE(weight_total == 1);  // exactly one residual draw

  std::vector<std::vector<Rat>> marginal(length,
                                         std::vector<Rat>(probs.size(), Rat(0)));
  std::vector<int> perm(length);
  for (std::size_t r = 0; r < probs.size(); ++r) {
    if (weights[r] == 0) continue;
    std::iota(perm.begin(), perm.end(), 0);
    Rat perm_count = 0;
    std::vector<std::vector<Rat>> partial(length,
                                          std::vector<Rat>(probs.size(), Rat(0)));
    do {
      ExploreSequence seq =
          maxexplore_arrange(multiset, {static_cast<int>(r)}, perm);
      for (long i = 0; i < length; ++i) partial[i][seq.items[i]] += 1;
      perm_count += 1;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (long i = 0; i < length; ++i) {
      for (std::size_t k = 0; k < probs.size(); ++k) {
        marginal[i][k] += weights[r] * partial[i][k] / perm_count;
      }
    }
  }
  for (long i = 0; i < length; ++i) {
    for (std::size_t k = 0; k < probs.size(); ++k) {
      CHECK(marginal[i][k] == probs[k]);
    }
  }
}

TEST_CASE("multiset law: counts stay within floor and floor plus residual") {
  std::mt19937_64 gen(9);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + rep % 3;
    std::vector<Rat> probs = oracles::random_distribution(gen, n);
    const long length = 3 + rep % 7;
    long residual = length;
    for (const Rat& p : probs) {
      residual -= rat_floor(Rat(length) * p).get_si();
    }
    Rng rng(rep);
    ExploreSequence seq = max_explore(probs, length, rng);
    CHECK(static_cast<long>(seq.items.size()) == length);
    for (int k = 0; k < n; ++k) {
      const long count = std::count(seq.items.begin(), seq.items.end(), k);
      const long floor_k = rat_floor(Rat(length) * probs[k]).get_si();
      CHECK(count >= floor_k);
      CHECK(count <= floor_k + residual);
    }
  }
}

TEST_CASE("coverage is deterministic once the length meets the bound") {
  const std::vector<Rat> probs{Rat(3, 8), Rat(1, 8), Rat(1, 2)};
  const long length = 8;  // 1 / min positive = 8
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    ExploreSequence seq = max_explore(probs, length, rng);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::count(seq.items.begin(), seq.items.end(), k) >= 1);
    }
  }
}

TEST_CASE("position frequencies approach the mixture for larger lengths") {
  const std::vector<Rat> probs{Rat(5, 12), Rat(1, 3), Rat(1, 4)};
  const long length = 12;
  const int trials = 20000;
  std::vector<std::vector<long>> counts(length, std::vector<long>(3, 0));
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(static_cast<std::uint64_t>(trial) + 1000);
    ExploreSequence seq = max_explore(probs, length, rng);
    for (long i = 0; i < length; ++i) counts[i][seq.items[i]] += 1;
  }
  for (long i = 0; i < length; ++i) {
    for (int k = 0; k < 3; ++k) {
      const double p = rat_to_double(probs[k]);
      const double se = std::sqrt(p * (1 - p) / trials);
      const double freq = static_cast<double>(counts[i][k]) / trials;
      CHECK(std::abs(freq - p) <= 4 * se);
    }
  }
}

TEST_CASE("menu separation of example 1") {
  Instance inst = example1();
  std::vector<Menu> menus = enumerate_menus(inst);
  // (t0 -> a0, t1 -> a1): disjoint supports with half-mass atoms
  CHECK(menus[1].action_of_type == std::vector<int>{0, 1});
  CHECK(menu_separation(inst, menus[1]) == Rat(1, 4));
  // the all-zero menu is state-independent
  CHECK(menu_separation(inst, menus[0]) == 1);
  SampleBound degenerate = sample_bound(inst, menus[0], Rat(1, 20));
  CHECK(degenerate.degenerate);
  CHECK(degenerate.count == 1);
}

TEST_CASE("every menu of a single-state instance is degenerate") {
  std::mt19937_64 gen(2);
  Instance inst = oracles::random_instance(gen, 1, 2, 2);
  for (const Menu& m : enumerate_menus(inst)) {
    SampleBound b = sample_bound(inst, m, Rat(1, 20));
    CHECK(b.degenerate);
    CHECK(b.count == 1);
  }
}

TEST_CASE("sample bound with outward-rounded logarithm") {
  Instance inst = example1();
  std::vector<Menu> menus = enumerate_menus(inst);
  // delta_m = 1/4, |U| = 4, gamma = 1/20: ceil(32 ln 160) = 163
  SampleBound b = sample_bound(inst, menus[1], Rat(1, 20));
  CHECK(b.separation == Rat(1, 4));
  CHECK(b.count == 163);
  // halving gamma adds about ceil(32 ln 2) samples
  SampleBound half = sample_bound(inst, menus[1], Rat(1, 40));
  CHECK(half.count - b.count >= 22);
  CHECK(half.count - b.count <= 23);
  CHECK_THROWS_AS(sample_bound(inst, menus[1], Rat(0)), ValidationError);
  CHECK_THROWS_AS(sample_bound(inst, menus[1], Rat(2)), ValidationError);
}

TEST_CASE("private length of example 1 is one at small delta") {
  Instance inst = example1();
  PrivateAnalysis a = analyze_private(inst, Rat(1, 10));
  CHECK(required_length_private(inst, a, Rat(1, 20)) == 1);
  // at delta = 0 only the degenerate all-zero menu is ever explorable
  PrivateAnalysis exact = analyze_private(inst, 0);
  CHECK(required_length_private(inst, exact, Rat(1, 20)) == 1);
}

TEST_CASE("private sequences repeat the bound per menu") {
  Rng rng(3);
  ExploreSequence single = max_explore({Rat(1)}, 5, rng);
  CHECK(single.items == std::vector<int>(5, 0));

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng r(seed);
    ExploreSequence seq = max_explore({Rat(1, 2), Rat(1, 2)}, 4, r);
    std::vector<int> sorted = seq.items;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 0, 1, 1});
  }
}

TEST_CASE("floors meet the sample bound when the length does") {
  // floor(L p) >= B whenever L >= B/p and B >= 1
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Rat> probs = oracles::random_distribution(gen, 2 + rep % 3);
    std::vector<long> bounds(probs.size());
    for (auto& b : bounds) b = 1 + static_cast<long>(gen() % 40);
    const long length = length_from_bounds(bounds, probs);
    for (std::size_t k = 0; k < probs.size(); ++k) {
      CHECK(rat_floor(Rat(length) * probs[k]) >= bounds[k]);
    }
  }
}

TEST_CASE("invalid inputs are rejected") {
  Rng rng(1);
  CHECK_THROWS_AS(max_explore({Rat(1, 2)}, 4, rng), ValidationError);
  CHECK_THROWS_AS(max_explore({Rat(1)}, 0, rng), ValidationError);
}
