#include "bexplore/signal_structure.hpp"

#include <algorithm>

#include "bexplore/error.hpp"

namespace bexplore {

int SignalStructure::signal_index(const std::string& label) const {
  auto it = std::find(support.begin(), support.end(), label);
  if (it == support.end()) {
    throw ValidationError("signal", "unknown signal \"" + label + "\"");
  }
  return static_cast<int>(it - support.begin());
}

void validate_signal_structure(const Instance& inst,
                               const SignalStructure& s) {
  if (s.support.empty()) throw ValidationError("signal", "empty support");
  if (static_cast<int>(s.joint.size()) != inst.num_states()) {
    throw ValidationError("signal", "joint has wrong state dimension");
  }
  Rat total = 0;
  std::vector<Rat> marginal(s.support.size(), Rat(0));
  for (int w = 0; w < inst.num_states(); ++w) {
    if (static_cast<int>(s.joint[w].size()) != s.num_signals()) {
      throw ValidationError("signal", "joint has wrong signal dimension");
    }
    Rat row = 0;
    for (int i = 0; i < s.num_signals(); ++i) {
      if (s.joint[w][i] < 0) throw ValidationError("signal", "negative mass");
      row += s.joint[w][i];
      marginal[i] += s.joint[w][i];
    }
    if (row != inst.state_prior(w)) {
      throw ValidationError("signal", "state marginal differs from prior for " +
                                          inst.states()[w]);
    }
    total += row;
  }
  if (total != 1) throw ValidationError("signal", "joint does not sum to 1");
  for (int i = 0; i < s.num_signals(); ++i) {
    if (marginal[i] <= 0) {
      throw ValidationError("signal", "signal \"" + s.support[i] +
                                          "\" has zero marginal probability");
    }
  }
}

SignalStructure deterministic_structure(
    const Instance& inst, const std::vector<std::string>& value_of_state,
    const std::string& round_tag, std::vector<int>* signal_of_state) {
  SignalStructure s;
  s.round_tag = round_tag;
  std::vector<int> idx(inst.num_states(), -1);
  for (int w = 0; w < inst.num_states(); ++w) {
    auto it = std::find(s.support.begin(), s.support.end(), value_of_state[w]);
    if (it == s.support.end()) {
      s.support.push_back(value_of_state[w]);
      idx[w] = static_cast<int>(s.support.size()) - 1;
    } else {
      idx[w] = static_cast<int>(it - s.support.begin());
    }
  }
  s.joint.assign(inst.num_states(),
                 std::vector<Rat>(s.support.size(), Rat(0)));
  for (int w = 0; w < inst.num_states(); ++w) {
    s.joint[w][idx[w]] = inst.state_prior(w);
  }
  if (signal_of_state) *signal_of_state = idx;
  return s;
}

SignalStructure trivial_structure(const Instance& inst) {
  return deterministic_structure(
      inst, std::vector<std::string>(inst.num_states(), kEmptySignal),
      "phase-1");
}

}  // namespace bexplore
