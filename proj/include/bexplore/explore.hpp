#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bexplore/instance.hpp"
#include "bexplore/lp.hpp"
#include "bexplore/signal_structure.hpp"

namespace bexplore {

enum class Mode { Public, Private };

// A single-round stochastic recommendation policy: exact probability table
// over actions (public) or menu indices (private), one row per signal.
struct PolicyTable {
  Mode mode = Mode::Public;
  std::vector<std::vector<Rat>> table;  // [signal][item]
};

inline int action_var_index(int signal, int action, int num_actions) {
  return signal * num_actions + action;
}
inline int menu_var_index(int signal, int menu, int num_menus) {
  return signal * num_menus + menu;
}

// LP over variables x_{a,s} (variable order: signal-major, then action)
// whose feasible set is exactly the single-round BIC recommendation
// policies for `type`; the objective is x_{a0,s0}. Rows: one BIC row per
// ordered action pair (a, a') with a != a', one sum-to-one row per signal,
// one nonnegativity row per variable.
LinearProgram build_action_lp(const Instance& inst, const SignalStructure& s,
                              int type, int a0, int s0);

// { a : optimum of the (a, s) LP is strictly positive }
std::set<int> signal_explorable_actions(const Instance& inst,
                                        const SignalStructure& s, int type,
                                        int signal);

// Menu analog with the delta slack folded into every BIC row.
LinearProgram build_menu_lp(const Instance& inst, const SignalStructure& s,
                            const std::vector<Menu>& menus, const Rat& delta,
                            int m0, int s0);

std::set<int> delta_signal_explorable_menus(const Instance& inst,
                                            const SignalStructure& s,
                                            const std::vector<Menu>& menus,
                                            const Rat& delta, int signal);

// Explorable sets for every signal of a structure plus the max-support
// mixture over the per-target LP vertex policies.
struct SignalExplorability {
  std::vector<std::set<int>> explorable;  // [signal] -> item indices
  PolicyTable pimax;
};

SignalExplorability analyze_signal_public(const Instance& inst,
                                          const SignalStructure& s, int type);
SignalExplorability analyze_signal_private(const Instance& inst,
                                           const SignalStructure& s,
                                           const std::vector<Menu>& menus,
                                           const Rat& delta);

PolicyTable max_support_policy(const Instance& inst, const SignalStructure& s,
                               int type);
PolicyTable max_support_policy_menus(const Instance& inst,
                                     const SignalStructure& s,
                                     const std::vector<Menu>& menus,
                                     const Rat& delta);

struct ExplorableReport {
  Mode mode = Mode::Public;
  Rat delta = 0;
  int type = -1;  // public mode
  SignalStructure structure;
  SignalExplorability analysis;
};

ExplorableReport explorable_report(const Instance& inst,
                                   const SignalStructure& s, Mode mode,
                                   int type, const Rat& delta);

using PairSet = std::set<std::pair<int, int>>;  // (type, action)

// One exploration phase of the public engine: the phase signal is the set
// of type-action-reward triples explored so far, a deterministic function
// of the state because utilities are deterministic.
struct PublicPhase {
  SignalStructure structure;
  std::vector<int> signal_of_state;
  std::vector<SignalExplorability> per_type;
  std::vector<PairSet> explored_after;  // per state, cumulative
};

struct PublicAnalysis {
  std::vector<PublicPhase> phases;  // at least `exploration_phases` entries
  int exploration_phases = 0;       // |A| * |Theta|
  int stabilized_at = 0;            // first phase that added nothing
  std::vector<PairSet> stable;      // per state
};

PublicAnalysis analyze_public(const Instance& inst);

struct PrivatePhase {
  SignalStructure structure;
  std::vector<int> signal_of_state;
  SignalExplorability menus;
  std::vector<std::set<int>> explored_after;  // per state, cumulative
};

struct PrivateAnalysis {
  std::vector<Menu> menus;
  Rat delta = 0;
  std::vector<PrivatePhase> phases;  // at least `exploration_phases` entries
  int exploration_phases = 0;        // |M|
  int stabilized_at = 0;
  std::vector<std::set<int>> stable;
};

PrivateAnalysis analyze_private(const Instance& inst, const Rat& delta,
                                std::size_t menu_cap = 1000000);

// The per-phase signal structures the engine's policies run on.
std::vector<SignalStructure> enumerate_phase_signals(const Instance& inst,
                                                     Mode mode,
                                                     const Rat& delta = 0);

std::vector<PairSet> eventually_explorable_public(const Instance& inst);
std::vector<std::set<int>> eventually_explorable_private(const Instance& inst,
                                                         const Rat& delta);

// Type-action pairs appearing in some explorable menu; the private-side
// object comparable against the public explorable set.
std::vector<PairSet> private_pairs(const Instance& inst, const Rat& delta);

// OPT_pub / OPT_pri. The private benchmark is defined over BIC-explorable
// menus, i.e. delta = 0.
Rat benchmark_opt(const Instance& inst, Mode mode, const Rat& delta = 0);

using LabelPair = std::pair<std::string, std::string>;
using LabelPairSet = std::set<LabelPair>;

struct StaticsReport {
  bool same_support = false;
  bool support_subset = false;  // alt support strictly inside the original
  bool public_claim_ok = false;
  std::vector<LabelPairSet> public_full, public_alt;    // per state
  std::vector<LabelPairSet> private_full, private_alt;  // per state
  std::vector<std::string> notes;
};

// Re-runs the public fixed point under an alternative type distribution
// (support within the instance's types) and checks the support-set claims;
// private sets are reported without any monotonicity assertion.
StaticsReport comparative_statics(const Instance& inst,
                                  const std::map<std::string, Rat>& alt_dist);

// Joint distribution over (state, S, S'); the object of the
// information-monotonicity checks.
struct StateSignalJoint {
  std::vector<std::string> s_support;
  std::vector<std::string> sp_support;
  std::vector<std::vector<std::vector<Rat>>> mass;  // [state][s][s']
};

struct MonotonicityReport {
  double mi = 0;            // I(S'; omega | S)
  bool exact_zero = false;  // rational-side independence certificate
  bool applicable = false;  // hypothesis of the checked lemma holds
  bool containment_ok = false;
  std::vector<std::string> witnesses;
};

// With the exact-zero certificate, asserts EX_{s'}[S'] subset of EX_s[S]
// for every positive-mass pair; in private mode accepts I <= delta^2/8 and
// checks containment in the delta-explorable sets instead.
MonotonicityReport check_information_monotonicity(const Instance& inst,
                                                  const StateSignalJoint& joint,
                                                  Mode mode,
                                                  const Rat& delta = 0);

// Canonical rendering of phase-signal values (shared with the policies).
std::string render_public_signal(const Instance& inst, const PairSet& explored,
                                 int state);
std::string render_private_signal(const Instance& inst,
                                  const std::vector<Menu>& menus,
                                  const std::set<int>& explored, int state);

}  // namespace bexplore
