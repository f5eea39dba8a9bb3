#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bexplore/rational.hpp"

namespace bexplore {

// Total mapping from types to actions, stored as action indices in the
// canonical type order. Menus are the message format whenever types are
// not public.
struct Menu {
  std::vector<int> action_of_type;

  bool operator==(const Menu&) const = default;
  auto operator<=>(const Menu&) const = default;
};

// A problem instance: finite state/type/action spaces, exact rational
// priors, and a dense deterministic utility table u(type, action, state).
// Immutable after load; safe to share across threads.
class Instance {
 public:
  Instance(std::vector<std::string> states, std::vector<std::string> types,
           std::vector<std::string> actions, std::vector<Rat> state_prior,
           std::vector<Rat> type_dist, std::vector<Rat> utility);

  int num_states() const { return static_cast<int>(states_.size()); }
  int num_types() const { return static_cast<int>(types_.size()); }
  int num_actions() const { return static_cast<int>(actions_.size()); }

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& types() const { return types_; }
  const std::vector<std::string>& actions() const { return actions_; }

  const Rat& state_prior(int state) const { return state_prior_[state]; }
  const Rat& type_prob(int type) const { return type_dist_[type]; }

  // u(type, action, state)
  const Rat& utility(int type, int action, int state) const {
    return utility_[(static_cast<std::size_t>(type) * actions_.size() +
                     action) *
                        states_.size() +
                    state];
  }

  int state_index(const std::string& label) const;
  int type_index(const std::string& label) const;
  int action_index(const std::string& label) const;

  bool operator==(const Instance&) const = default;

 private:
  std::vector<std::string> states_;
  std::vector<std::string> types_;
  std::vector<std::string> actions_;
  std::vector<Rat> state_prior_;
  std::vector<Rat> type_dist_;
  std::vector<Rat> utility_;  // type-major, then action, then state
  std::map<std::string, int> state_idx_, type_idx_, action_idx_;
};

// Distribution over (action, reward) pairs. Zero-mass pairs are excluded,
// identical pairs merged, entries sorted by (action, reward).
struct OutcomeDistribution {
  struct Atom {
    int action;
    Rat reward;
    Rat prob;
    bool operator==(const Atom&) const = default;
  };
  std::vector<Atom> atoms;

  bool operator==(const OutcomeDistribution&) const = default;
};

// Loads an instance from its JSON document. Rationals are written as
// decimal integers or "p/q" strings. Errors carry the offending field path.
Instance load_instance(const std::string& text);

// Canonical serialization; load -> serialize -> load is the identity.
std::string serialize_instance(const Instance& inst);

Instance load_instance_file(const std::string& path);

// Sum over states of prior(state) * u(type, action, state).
Rat expected_utility_prior(const Instance& inst, int type, int action);
Rat expected_utility_prior(const Instance& inst, const std::string& type,
                           const std::string& action);

// All |A|^|Theta| menus in lexicographic order over the type list.
// Throws when the count exceeds `cap`.
std::vector<Menu> enumerate_menus(const Instance& inst,
                                  std::size_t cap = 1000000);

std::size_t menu_count(const Instance& inst);

// Distribution of (m(theta), u(theta, m(theta), state)) with theta drawn
// from the type distribution.
OutcomeDistribution menu_outcome_distribution(const Instance& inst,
                                              const Menu& m, int state);

std::string menu_to_string(const Instance& inst, const Menu& m);

}  // namespace bexplore
