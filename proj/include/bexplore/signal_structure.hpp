#pragma once

#include <string>
#include <vector>

#include "bexplore/instance.hpp"

namespace bexplore {

// The principal's information at a round: a finite signal support plus the
// exact joint distribution over (state, signal). Input to every
// explorability LP. Pr[s|w] never appears on its own; the LP rows consume
// the joint directly.
struct SignalStructure {
  std::vector<std::string> support;      // canonical order
  std::vector<std::vector<Rat>> joint;   // [state][signal]
  std::string round_tag;

  int num_signals() const { return static_cast<int>(support.size()); }
  int signal_index(const std::string& label) const;

  bool operator==(const SignalStructure&) const = default;
};

// Joint sums to 1, per-state marginals equal the prior, every supported
// signal has positive marginal mass. Throws otherwise.
void validate_signal_structure(const Instance& inst, const SignalStructure& s);

// Structure of a signal that is a deterministic function of the state:
// joint = pushforward of the prior. Support is ordered by first occurrence
// over the canonical state order. Also returns the per-state signal index.
SignalStructure deterministic_structure(const Instance& inst,
                                        const std::vector<std::string>& value_of_state,
                                        const std::string& round_tag,
                                        std::vector<int>* signal_of_state = nullptr);

// The empty-history structure: a single signal carrying nothing.
SignalStructure trivial_structure(const Instance& inst);

inline const char* kEmptySignal = "{}";

}  // namespace bexplore
