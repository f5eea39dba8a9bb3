#pragma once

#include <vector>

#include "bexplore/explore.hpp"
#include "bexplore/instance.hpp"
#include "bexplore/rng.hpp"

namespace bexplore {

// A fixed-length recommendation list: floor-copies of each item, residual
// draws, then a uniform permutation. Every positive-probability item is
// covered deterministically once the length meets its bound.
struct ExploreSequence {
  std::vector<int> items;
};

// Deterministic core used both by the generator and by the enumeration
// oracle in tests: floor copies in canonical item order, then the residual
// choices, then `permutation` applied to the whole list.
std::vector<int> maxexplore_multiset(const std::vector<Rat>& probs, long length);
ExploreSequence maxexplore_arrange(const std::vector<int>& multiset,
                                   const std::vector<int>& residual_choices,
                                   const std::vector<int>& permutation);

// Residual weights C_i - floor(C_i) (unnormalized), in item order.
std::vector<Rat> maxexplore_residual_weights(const std::vector<Rat>& probs,
                                             long length);

// Random variant: residual draws consume the generator before the
// Fisher-Yates permutation, in canonical item order.
ExploreSequence max_explore(const std::vector<Rat>& probs, long length,
                            Rng& rng);

// L_theta: ceiling of the reciprocal of the smallest positive pi-max entry
// across every phase structure and signal.
long required_length_public(const Instance& inst, const PublicAnalysis& a,
                            int type);

ExploreSequence max_explore_public(const PolicyTable& pimax, int signal,
                                   long length, Rng& rng);

// Half the smallest distinguishing probability gap over state pairs the
// menu separates; degenerate menus (no separated pair) use the convention
// separation = 1, count = 1.
struct SampleBound {
  Rat separation;  // delta_m
  long count = 1;  // B_m(gamma)
  bool degenerate = false;
};

Rat menu_separation(const Instance& inst, const Menu& m);

// B_m(gamma) = ceil((2/delta_m^2) * ln(2|U|/gamma)), ln outward-rounded so
// the Chernoff direction is never undercut.
SampleBound sample_bound(const Instance& inst, const Menu& m, const Rat& gamma);

// max over phases/signals/menus of B_m(gamma0) / Pr[pi-max(s) = m].
long required_length_private(const Instance& inst, const PrivateAnalysis& a,
                             const Rat& gamma0);

// Exposed for direct verification of the length rule.
long length_from_bounds(const std::vector<long>& counts,
                        const std::vector<Rat>& probs);

ExploreSequence max_explore_private(const PolicyTable& pimax, int signal,
                                    long length, Rng& rng);

}  // namespace bexplore
