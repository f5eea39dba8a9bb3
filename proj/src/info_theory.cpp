#include "bexplore/info_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bexplore/error.hpp"
#include "bexplore/explore.hpp"

namespace bexplore {

FiniteJoint::FiniteJoint(std::vector<std::string> names,
                         std::vector<std::vector<std::string>> supports)
    : names_(std::move(names)), supports_(std::move(supports)) {
  if (names_.empty() || names_.size() != supports_.size()) {
    throw ValidationError("joint", "variable/support mismatch");
  }
}

void FiniteJoint::add_mass(const std::vector<int>& outcome, const Rat& p) {
  if (outcome.size() != names_.size()) {
    throw ValidationError("joint", "outcome arity mismatch");
  }
  for (std::size_t v = 0; v < outcome.size(); ++v) {
    if (outcome[v] < 0 ||
        outcome[v] >= static_cast<int>(supports_[v].size())) {
      throw ValidationError("joint", "outcome value out of support");
    }
  }
  if (p < 0) throw ValidationError("joint", "negative mass");
  if (p == 0) return;
  mass_[outcome] += p;
}

void FiniteJoint::validate() const {
  Rat total = 0;
  for (const auto& [_, p] : mass_) {
    if (p < 0) throw ValidationError("joint", "negative mass");
    total += p;
  }
  if (total != 1) {
    throw ValidationError("joint", "mass sums to " + rat_to_string(total));
  }
}

int FiniteJoint::var_index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    throw ValidationError("joint", "unknown variable \"" + name + "\"");
  }
  return static_cast<int>(it - names_.begin());
}

std::map<std::vector<int>, Rat> FiniteJoint::marginal(
    const std::vector<int>& vars) const {
  for (int v : vars) {
    if (v < 0 || v >= num_vars()) {
      throw ValidationError("joint", "variable index out of range");
    }
  }
  std::map<std::vector<int>, Rat> out;
  std::vector<int> key(vars.size());
  for (const auto& [outcome, p] : mass_) {
    for (std::size_t i = 0; i < vars.size(); ++i) key[i] = outcome[vars[i]];
    out[key] += p;
  }
  return out;
}

namespace {

double entropy_of(const std::map<std::vector<int>, Rat>& marginal) {
  if (marginal.size() <= 1) return 0.0;  // point mass, exactly zero
  double h = 0;
  for (const auto& [_, p] : marginal) {
    const double pd = rat_to_double(p);
    if (pd > 0) h -= pd * std::log2(pd);
  }
  return h;
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

double entropy(const FiniteJoint& j, const std::vector<int>& vars) {
  return entropy_of(j.marginal(vars));
}

CmiResult conditional_mutual_information(const FiniteJoint& j,
                                         const std::vector<int>& x,
                                         const std::vector<int>& y,
                                         const std::vector<int>& z) {
  for (int vx : x) {
    for (int vy : y) {
      if (vx == vy) throw ValidationError("joint", "X and Y must be disjoint");
    }
  }
  for (int vz : z) {
    for (int v : concat(x, y)) {
      if (v == vz) throw ValidationError("joint", "Z must be disjoint");
    }
  }

  CmiResult result;
  // I(X;Y|Z) = H(X,Z) + H(Y,Z) - H(Z) - H(X,Y,Z)
  const double hxz = entropy(j, concat(x, z));
  const double hyz = entropy(j, concat(y, z));
  const double hz = entropy(j, z);
  const double hxyz = entropy(j, concat(concat(x, y), z));
  result.value = std::max(0.0, hxz + hyz - hz - hxyz);

  // exact certificate: p(x,y|z) factorizes in every z-cell
  auto mxyz = j.marginal(concat(concat(x, y), z));
  auto mxz = j.marginal(concat(x, z));
  auto myz = j.marginal(concat(y, z));
  auto mz = j.marginal(z);
  result.exact_zero = true;
  for (const auto& [zkey, pz] : mz) {
    if (pz == 0) continue;
    for (const auto& [xzkey, pxz] : mxz) {
      if (!std::equal(zkey.begin(), zkey.end(), xzkey.begin() + x.size())) {
        continue;
      }
      for (const auto& [yzkey, pyz] : myz) {
        if (!std::equal(zkey.begin(), zkey.end(), yzkey.begin() + y.size())) {
          continue;
        }
        std::vector<int> full(xzkey.begin(), xzkey.begin() + x.size());
        full.insert(full.end(), yzkey.begin(), yzkey.begin() + y.size());
        full.insert(full.end(), zkey.begin(), zkey.end());
        auto it = mxyz.find(full);
        const Rat pxyz = (it == mxyz.end()) ? Rat(0) : it->second;
        if (pxyz * pz != pxz * pyz) {
          result.exact_zero = false;
          break;
        }
      }
      if (!result.exact_zero) break;
    }
    if (!result.exact_zero) break;
  }
  if (result.exact_zero) result.value = 0.0;
  return result;
}

double kl_divergence(const std::vector<Rat>& p, const std::vector<Rat>& q) {
  if (p.size() != q.size()) {
    throw ValidationError("kl", "distributions have different supports");
  }
  if (p == q) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    if (q[i] == 0) return std::numeric_limits<double>::infinity();
    sum += rat_to_double(p[i]) * std::log2(rat_to_double(p[i] / q[i]));
  }
  return std::max(0.0, sum);
}

InequalityCheck pinsker_check(const std::vector<Rat>& p,
                              const std::vector<Rat>& q) {
  Rat l1 = 0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += abs(p[i] - q[i]);
  InequalityCheck check;
  check.lhs = rat_to_double(l1);
  const double kl = kl_divergence(p, q);
  check.rhs = std::isinf(kl) ? kl : std::sqrt(2 * std::log(2.0) * kl);
  check.slack = check.rhs - check.lhs;
  check.holds = check.lhs <= check.rhs + 1e-12;
  return check;
}

InequalityCheck fano_check(const FiniteJoint& j, int x, int y, int xhat) {
  // Xhat must be a deterministic function of Y
  auto myh = j.marginal({y, xhat});
  auto my = j.marginal({y});
  if (myh.size() != my.size()) {
    throw ValidationError("fano", "Xhat is not a deterministic function of Y");
  }

  Rat perr = 0;
  for (const auto& [key, p] : j.marginal({x, xhat})) {
    if (key[0] != key[1]) perr += p;
  }
  const std::size_t support_x = j.marginal({x}).size();

  InequalityCheck check;
  // H(X|Y) = H(X,Y) - H(Y)
  check.lhs = entropy(j, {x, y}) - entropy(j, {y});
  if (check.lhs < 0) check.lhs = 0;
  const double pe = rat_to_double(perr);
  double he = 0;
  if (pe > 0 && pe < 1) he = -pe * std::log2(pe) - (1 - pe) * std::log2(1 - pe);
  double tail = 0;
  if (perr > 0 && support_x > 1) {
    tail = pe * std::log2(static_cast<double>(support_x - 1));
  }
  check.rhs = he + tail;
  check.slack = check.rhs - check.lhs;
  check.holds = check.lhs <= check.rhs + 1e-12;
  return check;
}

namespace {

// Reference BIC policy for the lemma-level identities: the greedy
// round-granular policy that plays the max-support mixture of its own
// round-t signal structure. Histories are enumerated exactly.
struct HistoryAtom {
  std::vector<int> history;  // value index per completed round
  int state;
  Rat prob;  // joint probability with the state
};

}  // namespace

FiniteJoint policy_history_joint(const Instance& inst,
                                 const PolicyHistorySpec& spec) {
  if (spec.rounds < 1) throw ValidationError("rounds", "must be >= 1");
  const int W = inst.num_states();
  const int l = spec.rounds;

  std::vector<Menu> menus;
  if (spec.mode == Mode::Private) menus = enumerate_menus(inst);

  // atoms: joint over (state, history-so-far); histories share a global
  // value list per round
  std::vector<HistoryAtom> atoms;
  for (int w = 0; w < W; ++w) {
    atoms.push_back({{}, w, inst.state_prior(w)});
  }
  std::vector<std::vector<std::string>> round_values;  // per round

  for (int t = 1; t <= l - 1; ++t) {
    // signal = the full history so far; structure from current atoms
    std::vector<std::string> hist_labels;
    std::map<std::vector<int>, int> hist_index;
    for (const auto& atom : atoms) {
      if (!hist_index.count(atom.history)) {
        std::string label = "h";
        for (int v : atom.history) label += "." + std::to_string(v);
        hist_index[atom.history] = static_cast<int>(hist_labels.size());
        hist_labels.push_back(label);
      }
    }
    SignalStructure s;
    s.support = hist_labels;
    s.round_tag = "round-" + std::to_string(t);
    s.joint.assign(W, std::vector<Rat>(hist_labels.size(), Rat(0)));
    for (const auto& atom : atoms) {
      s.joint[atom.state][hist_index[atom.history]] += atom.prob;
    }

    std::vector<HistoryAtom> next;
    std::map<std::string, int> value_index;
    std::vector<std::string> values;
    auto value_of = [&](const std::string& label) {
      auto it = value_index.find(label);
      if (it != value_index.end()) return it->second;
      const int idx = static_cast<int>(values.size());
      value_index[label] = idx;
      values.push_back(label);
      return idx;
    };

    if (spec.mode == Mode::Public) {
      std::vector<SignalExplorability> per_type;
      for (int ty = 0; ty < inst.num_types(); ++ty) {
        per_type.push_back(analyze_signal_public(inst, s, ty));
      }
      for (const auto& atom : atoms) {
        const int sig = hist_index[atom.history];
        for (int ty = 0; ty < inst.num_types(); ++ty) {
          for (int a = 0; a < inst.num_actions(); ++a) {
            const Rat& pa = per_type[ty].pimax.table[sig][a];
            if (pa == 0) continue;
            const Rat p = atom.prob * inst.type_prob(ty) * pa;
            const std::string label =
                "(" + inst.types()[ty] + "," + inst.actions()[a] + "," +
                rat_to_string(inst.utility(ty, a, atom.state)) + ")";
            HistoryAtom na = atom;
            na.history.push_back(value_of(label));
            na.prob = p;
            next.push_back(std::move(na));
          }
        }
      }
    } else {
      SignalExplorability sx = analyze_signal_private(inst, s, menus, 0);
      for (const auto& atom : atoms) {
        const int sig = hist_index[atom.history];
        for (int m = 0; m < static_cast<int>(menus.size()); ++m) {
          const Rat& pm = sx.pimax.table[sig][m];
          if (pm == 0) continue;
          for (int ty = 0; ty < inst.num_types(); ++ty) {
            const int a = menus[m].action_of_type[ty];
            const Rat p = atom.prob * inst.type_prob(ty) * pm;
            const std::string label =
                "(m" + std::to_string(m) + "," + inst.actions()[a] + "," +
                rat_to_string(inst.utility(ty, a, atom.state)) + ")";
            HistoryAtom na = atom;
            na.history.push_back(value_of(label));
            na.prob = p;
            next.push_back(std::move(na));
          }
        }
      }
    }

    // merge atoms that collapsed to the same (state, history)
    std::map<std::pair<int, std::vector<int>>, Rat> merged;
    for (auto& atom : next) {
      merged[{atom.state, atom.history}] += atom.prob;
    }
    atoms.clear();
    for (auto& [key, p] : merged) {
      atoms.push_back({key.second, key.first, p});
    }
    if (atoms.size() > spec.cap) {
      throw ValidationError("joint", "history enumeration exceeds cap");
    }
    round_values.push_back(values);
  }

  // engine phase-l signal, a deterministic function of the state
  std::vector<std::string> phase_value(W);
  if (spec.mode == Mode::Public) {
    PublicAnalysis a = analyze_public(inst);
    const auto& phase = a.phases[std::min(
        l - 1, static_cast<int>(a.phases.size()) - 1)];
    for (int w = 0; w < W; ++w) {
      phase_value[w] = phase.structure.support[phase.signal_of_state[w]];
    }
  } else {
    PrivateAnalysis a = analyze_private(inst, spec.delta);
    const auto& phase = a.phases[std::min(
        l - 1, static_cast<int>(a.phases.size()) - 1)];
    for (int w = 0; w < W; ++w) {
      phase_value[w] = phase.structure.support[phase.signal_of_state[w]];
    }
  }
  std::vector<std::string> phase_support;
  std::vector<int> phase_idx(W);
  for (int w = 0; w < W; ++w) {
    auto it = std::find(phase_support.begin(), phase_support.end(),
                        phase_value[w]);
    if (it == phase_support.end()) {
      phase_idx[w] = static_cast<int>(phase_support.size());
      phase_support.push_back(phase_value[w]);
    } else {
      phase_idx[w] = static_cast<int>(it - phase_support.begin());
    }
  }

  std::vector<std::string> names{"omega"};
  std::vector<std::vector<std::string>> supports{inst.states()};
  for (int t = 1; t <= l - 1; ++t) {
    names.push_back("H" + std::to_string(t));
    supports.push_back(round_values[t - 1]);
  }
  names.push_back("S");
  supports.push_back(phase_support);

  FiniteJoint joint(std::move(names), std::move(supports));
  for (const auto& atom : atoms) {
    std::vector<int> outcome{atom.state};
    outcome.insert(outcome.end(), atom.history.begin(), atom.history.end());
    outcome.push_back(phase_idx[atom.state]);
    joint.add_mass(outcome, atom.prob);
  }
  joint.validate();
  return joint;
}

}  // namespace bexplore
