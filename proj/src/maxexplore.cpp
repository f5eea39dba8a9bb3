#include "bexplore/maxexplore.hpp"

#include <algorithm>

#include "bexplore/error.hpp"

namespace bexplore {

std::vector<int> maxexplore_multiset(const std::vector<Rat>& probs,
                                     long length) {
  std::vector<int> items;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const Int copies = rat_floor(Rat(length) * probs[i]);
    for (Int c = 0; c < copies; ++c) items.push_back(static_cast<int>(i));
  }
  return items;
}

std::vector<Rat> maxexplore_residual_weights(const std::vector<Rat>& probs,
                                             long length) {
  std::vector<Rat> weights(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const Rat c = Rat(length) * probs[i];
    weights[i] = c - Rat(rat_floor(c));
  }
  return weights;
}

ExploreSequence maxexplore_arrange(const std::vector<int>& multiset,
                                   const std::vector<int>& residual_choices,
                                   const std::vector<int>& permutation) {
  std::vector<int> items = multiset;
  items.insert(items.end(), residual_choices.begin(), residual_choices.end());
  if (permutation.size() != items.size()) {
    throw ValidationError("maxexplore", "permutation arity mismatch");
  }
  ExploreSequence seq;
  seq.items.resize(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    seq.items[i] = items[permutation[i]];
  }
  return seq;
}

ExploreSequence max_explore(const std::vector<Rat>& probs, long length,
                            Rng& rng) {
  Rat total = 0;
  for (const Rat& p : probs) {
    if (p < 0) throw ValidationError("maxexplore", "negative probability");
    total += p;
  }
  if (total != 1) {
    throw ValidationError("maxexplore", "probabilities sum to " +
                                            rat_to_string(total));
  }
  if (length < 1) throw ValidationError("maxexplore", "length must be >= 1");

  ExploreSequence seq;
  seq.items = maxexplore_multiset(probs, length);
  const long residual = length - static_cast<long>(seq.items.size());
  if (residual > 0) {
    const std::vector<Rat> weights = maxexplore_residual_weights(probs, length);
    for (long r = 0; r < residual; ++r) {
      seq.items.push_back(static_cast<int>(rng.sample_categorical(weights)));
    }
  }
  rng.shuffle(seq.items);
  return seq;
}

long required_length_public(const Instance& inst, const PublicAnalysis& a,
                            int type) {
  if (type < 0 || type >= inst.num_types()) {
    throw ValidationError("types", "index out of range");
  }
  Rat max_reciprocal = 1;
  for (const auto& phase : a.phases) {
    const auto& table = phase.per_type[type].pimax.table;
    for (const auto& row : table) {
      for (const Rat& p : row) {
        if (p > 0 && 1 / p > max_reciprocal) max_reciprocal = 1 / p;
      }
    }
  }
  return rat_ceil_long(max_reciprocal);
}

ExploreSequence max_explore_public(const PolicyTable& pimax, int signal,
                                   long length, Rng& rng) {
  return max_explore(pimax.table.at(signal), length, rng);
}

Rat menu_separation(const Instance& inst, const Menu& m) {
  std::vector<OutcomeDistribution> dists;
  for (int w = 0; w < inst.num_states(); ++w) {
    dists.push_back(menu_outcome_distribution(inst, m, w));
  }
  // union of supports, with q(u, w) per state
  std::map<std::pair<int, Rat>, std::vector<Rat>> q;
  for (int w = 0; w < inst.num_states(); ++w) {
    for (const auto& atom : dists[w].atoms) {
      auto& row = q[{atom.action, atom.reward}];
      row.resize(inst.num_states(), Rat(0));
      q[{atom.action, atom.reward}][w] = atom.prob;
    }
  }
  for (auto& [_, row] : q) row.resize(inst.num_states(), Rat(0));

  // smallest distinguishing gap over separated state pairs; halved so the
  // +/- delta_m/2 matching test keeps a margin
  bool any_pair = false;
  Rat min_gap = 0;
  for (int w = 0; w < inst.num_states(); ++w) {
    for (int wp = w + 1; wp < inst.num_states(); ++wp) {
      if (dists[w] == dists[wp]) continue;
      Rat gap = 0;
      for (const auto& [_, row] : q) {
        const Rat d = abs(row[w] - row[wp]);
        if (d > gap) gap = d;
      }
      if (!any_pair || gap < min_gap) min_gap = gap;
      any_pair = true;
    }
  }
  if (!any_pair) return 1;  // degenerate convention
  return min_gap / 2;
}

SampleBound sample_bound(const Instance& inst, const Menu& m,
                         const Rat& gamma) {
  if (gamma <= 0 || gamma >= 1) {
    throw ValidationError("gamma", "must lie in (0, 1)");
  }
  SampleBound bound;
  bound.separation = menu_separation(inst, m);

  std::set<std::pair<int, Rat>> support_union;
  bool degenerate = true;
  OutcomeDistribution first = menu_outcome_distribution(inst, m, 0);
  for (int w = 0; w < inst.num_states(); ++w) {
    OutcomeDistribution d = menu_outcome_distribution(inst, m, w);
    if (!(d == first)) degenerate = false;
    for (const auto& atom : d.atoms) {
      support_union.insert({atom.action, atom.reward});
    }
  }
  bound.degenerate = degenerate;
  if (degenerate) {
    bound.count = 1;
    return bound;
  }
  const Rat u_count(static_cast<long>(support_union.size()));
  const Rat log_term = ln_upper(2 * u_count / gamma);
  bound.count = rat_ceil_long(2 / (bound.separation * bound.separation) *
                              log_term);
  if (bound.count < 1) bound.count = 1;
  return bound;
}

long length_from_bounds(const std::vector<long>& counts,
                        const std::vector<Rat>& probs) {
  if (counts.size() != probs.size()) {
    throw ValidationError("maxexplore", "bounds/probs arity mismatch");
  }
  Rat best = 1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0) continue;
    const Rat candidate = Rat(counts[i]) / probs[i];
    if (candidate > best) best = candidate;
  }
  return rat_ceil_long(best);
}

long required_length_private(const Instance& inst, const PrivateAnalysis& a,
                             const Rat& gamma0) {
  std::vector<long> counts(a.menus.size());
  for (std::size_t m = 0; m < a.menus.size(); ++m) {
    counts[m] = sample_bound(inst, a.menus[m], gamma0).count;
  }
  long best = 1;
  for (const auto& phase : a.phases) {
    for (const auto& row : phase.menus.pimax.table) {
      std::vector<Rat> probs(row.begin(), row.end());
      const long candidate = length_from_bounds(counts, probs);
      if (candidate > best) best = candidate;
    }
  }
  return best;
}

ExploreSequence max_explore_private(const PolicyTable& pimax, int signal,
                                    long length, Rng& rng) {
  return max_explore(pimax.table.at(signal), length, rng);
}

}  // namespace bexplore
