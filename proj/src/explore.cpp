#include "bexplore/explore.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "bexplore/error.hpp"
#include "bexplore/info_theory.hpp"

namespace bexplore {

namespace {

std::string render_outcome_distribution(const Instance& inst,
                                        const OutcomeDistribution& d) {
  std::string out = "[";
  bool first = true;
  for (const auto& atom : d.atoms) {
    if (!first) out += ",";
    first = false;
    out += "(" + inst.actions()[atom.action] + "," + rat_to_string(atom.reward) +
           "):" + rat_to_string(atom.prob);
  }
  return out + "]";
}

}  // namespace

std::string render_public_signal(const Instance& inst, const PairSet& explored,
                                 int state) {
  if (explored.empty()) return kEmptySignal;
  std::string out = "{";
  bool first = true;
  for (const auto& [t, a] : explored) {
    if (!first) out += ",";
    first = false;
    out += "(" + inst.types()[t] + "," + inst.actions()[a] + "," +
           rat_to_string(inst.utility(t, a, state)) + ")";
  }
  return out + "}";
}

std::string render_private_signal(const Instance& inst,
                                  const std::vector<Menu>& menus,
                                  const std::set<int>& explored, int state) {
  if (explored.empty()) return kEmptySignal;
  std::string out = "{";
  bool first = true;
  for (int m : explored) {
    if (!first) out += ";";
    first = false;
    out += "m" + std::to_string(m) + ":" +
           render_outcome_distribution(
               inst, menu_outcome_distribution(inst, menus[m], state));
  }
  return out + "}";
}

LinearProgram build_action_lp(const Instance& inst, const SignalStructure& s,
                              int type, int a0, int s0) {
  if (type < 0 || type >= inst.num_types()) {
    throw ValidationError("types", "index out of range");
  }
  if (a0 < 0 || a0 >= inst.num_actions()) {
    throw ValidationError("actions", "index out of range");
  }
  if (s0 < 0 || s0 >= s.num_signals()) {
    throw ValidationError("signal", "index out of range");
  }
  const int A = inst.num_actions();
  const int X = s.num_signals();
  LinearProgram lp;
  lp.num_vars = X * A;
  lp.objective.assign(lp.num_vars, Rat(0));
  lp.objective[action_var_index(s0, a0, A)] = 1;
  // BIC rows: following recommendation a beats deviating to a'
  for (int a = 0; a < A; ++a) {
    for (int ap = 0; ap < A; ++ap) {
      if (ap == a) continue;
      LpConstraint row;
      for (int sig = 0; sig < X; ++sig) {
        Rat coef = 0;
        for (int w = 0; w < inst.num_states(); ++w) {
          coef += s.joint[w][sig] *
                  (inst.utility(type, a, w) - inst.utility(type, ap, w));
        }
        if (coef != 0) {
          row.coeffs.emplace_back(action_var_index(sig, a, A), coef);
        }
      }
      row.rel = Relation::GreaterEqual;
      row.rhs = 0;
      lp.constraints.push_back(std::move(row));
    }
  }
  for (int sig = 0; sig < X; ++sig) {
    LpConstraint sum;
    for (int a = 0; a < A; ++a) {
      sum.coeffs.emplace_back(action_var_index(sig, a, A), Rat(1));
    }
    sum.rel = Relation::Equal;
    sum.rhs = 1;
    lp.constraints.push_back(std::move(sum));
  }
  for (int v = 0; v < lp.num_vars; ++v) {
    lp.constraints.push_back({{{v, Rat(1)}}, Relation::GreaterEqual, Rat(0)});
  }
  return lp;
}

LinearProgram build_menu_lp(const Instance& inst, const SignalStructure& s,
                            const std::vector<Menu>& menus, const Rat& delta,
                            int m0, int s0) {
  if (delta < 0) throw ValidationError("delta", "must be >= 0");
  if (m0 < 0 || m0 >= static_cast<int>(menus.size())) {
    throw ValidationError("menus", "index out of range");
  }
  if (s0 < 0 || s0 >= s.num_signals()) {
    throw ValidationError("signal", "index out of range");
  }
  const int M = static_cast<int>(menus.size());
  const int X = s.num_signals();
  LinearProgram lp;
  lp.num_vars = X * M;
  lp.objective.assign(lp.num_vars, Rat(0));
  lp.objective[menu_var_index(s0, m0, M)] = 1;
  for (int m = 0; m < M; ++m) {
    for (int mp = 0; mp < M; ++mp) {
      if (mp == m) continue;
      for (int t = 0; t < inst.num_types(); ++t) {
        const int am = menus[m].action_of_type[t];
        const int amp = menus[mp].action_of_type[t];
        LpConstraint row;
        for (int sig = 0; sig < X; ++sig) {
          Rat coef = 0;
          for (int w = 0; w < inst.num_states(); ++w) {
            coef += s.joint[w][sig] *
                    (inst.utility(t, am, w) - inst.utility(t, amp, w) + delta);
          }
          if (coef != 0) {
            row.coeffs.emplace_back(menu_var_index(sig, m, M), coef);
          }
        }
        row.rel = Relation::GreaterEqual;
        row.rhs = 0;
        lp.constraints.push_back(std::move(row));
      }
    }
  }
  for (int sig = 0; sig < X; ++sig) {
    LpConstraint sum;
    for (int m = 0; m < M; ++m) {
      sum.coeffs.emplace_back(menu_var_index(sig, m, M), Rat(1));
    }
    sum.rel = Relation::Equal;
    sum.rhs = 1;
    lp.constraints.push_back(std::move(sum));
  }
  for (int v = 0; v < lp.num_vars; ++v) {
    lp.constraints.push_back({{{v, Rat(1)}}, Relation::GreaterEqual, Rat(0)});
  }
  return lp;
}

namespace {

// Shared core of the per-structure analysis: solve one LP per
// (target, signal), keep targets with strictly positive optimum, and mix
// the vertex policies into pi-max.
SignalExplorability analyze_targets(
    int num_items, const SignalStructure& s, Mode mode,
    const std::function<LinearProgram(int, int)>& make_lp) {
  const int X = s.num_signals();
  SignalExplorability result;
  result.explorable.assign(X, {});
  result.pimax.mode = mode;
  result.pimax.table.assign(X, std::vector<Rat>(num_items, Rat(0)));

  std::vector<std::vector<std::vector<Rat>>> vertices(X);
  for (int sig = 0; sig < X; ++sig) {
    for (int item = 0; item < num_items; ++item) {
      LinearProgram lp = make_lp(item, sig);
      LpOutcome out = solve(lp);
      if (out.status != LpStatus::Optimal) {
        throw ValidationError("explore", "BIC polytope unexpectedly " +
                                             std::string(out.status ==
                                                                 LpStatus::Infeasible
                                                             ? "infeasible"
                                                             : "unbounded"));
      }
      if (out.value > 0) {
        result.explorable[sig].insert(item);
        vertices[sig].push_back(std::move(out.point));
      }
    }
    if (result.explorable[sig].empty()) {
      throw ValidationError("explore",
                            "empty explorable set at signal " + s.support[sig]);
    }
  }
  for (int sig = 0; sig < X; ++sig) {
    const Rat weight =
        Rat(1) / (Rat(X) * Rat(static_cast<long>(vertices[sig].size())));
    for (const auto& point : vertices[sig]) {
      for (int sp = 0; sp < X; ++sp) {
        for (int item = 0; item < num_items; ++item) {
          const Rat& x = point[sp * num_items + item];
          if (x != 0) result.pimax.table[sp][item] += weight * x;
        }
      }
    }
  }
  return result;
}

}  // namespace

SignalExplorability analyze_signal_public(const Instance& inst,
                                          const SignalStructure& s, int type) {
  return analyze_targets(inst.num_actions(), s, Mode::Public,
                         [&](int a0, int s0) {
                           return build_action_lp(inst, s, type, a0, s0);
                         });
}

SignalExplorability analyze_signal_private(const Instance& inst,
                                           const SignalStructure& s,
                                           const std::vector<Menu>& menus,
                                           const Rat& delta) {
  return analyze_targets(static_cast<int>(menus.size()), s, Mode::Private,
                         [&](int m0, int s0) {
                           return build_menu_lp(inst, s, menus, delta, m0, s0);
                         });
}

std::set<int> signal_explorable_actions(const Instance& inst,
                                        const SignalStructure& s, int type,
                                        int signal) {
  if (signal < 0 || signal >= s.num_signals()) {
    throw ValidationError("signal", "index out of range");
  }
  std::set<int> out;
  for (int a = 0; a < inst.num_actions(); ++a) {
    LpOutcome r = solve(build_action_lp(inst, s, type, a, signal));
    if (r.status == LpStatus::Optimal && r.value > 0) out.insert(a);
  }
  return out;
}

std::set<int> delta_signal_explorable_menus(const Instance& inst,
                                            const SignalStructure& s,
                                            const std::vector<Menu>& menus,
                                            const Rat& delta, int signal) {
  if (signal < 0 || signal >= s.num_signals()) {
    throw ValidationError("signal", "index out of range");
  }
  std::set<int> out;
  for (int m = 0; m < static_cast<int>(menus.size()); ++m) {
    LpOutcome r = solve(build_menu_lp(inst, s, menus, delta, m, signal));
    if (r.status == LpStatus::Optimal && r.value > 0) out.insert(m);
  }
  return out;
}

PolicyTable max_support_policy(const Instance& inst, const SignalStructure& s,
                               int type) {
  return analyze_signal_public(inst, s, type).pimax;
}

PolicyTable max_support_policy_menus(const Instance& inst,
                                     const SignalStructure& s,
                                     const std::vector<Menu>& menus,
                                     const Rat& delta) {
  return analyze_signal_private(inst, s, menus, delta).pimax;
}

ExplorableReport explorable_report(const Instance& inst,
                                   const SignalStructure& s, Mode mode,
                                   int type, const Rat& delta) {
  ExplorableReport report;
  report.mode = mode;
  report.delta = delta;
  report.type = type;
  report.structure = s;
  if (mode == Mode::Public) {
    report.analysis = analyze_signal_public(inst, s, type);
  } else {
    report.analysis =
        analyze_signal_private(inst, s, enumerate_menus(inst), delta);
  }
  return report;
}

PublicAnalysis analyze_public(const Instance& inst) {
  const int W = inst.num_states();
  PublicAnalysis result;
  result.exploration_phases = inst.num_actions() * inst.num_types();
  std::vector<PairSet> explored(W);
  // a no-change phase reproduces itself, so the loop is bounded by the
  // total number of distinct additions
  const int hard_cap = result.exploration_phases * W + 2;

  std::map<std::vector<std::string>, std::vector<SignalExplorability>> cache;
  for (int l = 1; l <= hard_cap; ++l) {
    std::vector<std::string> values(W);
    for (int w = 0; w < W; ++w) {
      values[w] = render_public_signal(inst, explored[w], w);
    }
    PublicPhase phase;
    phase.structure = deterministic_structure(
        inst, values, "phase-" + std::to_string(l), &phase.signal_of_state);
    auto it = cache.find(values);
    if (it != cache.end()) {
      phase.per_type = it->second;
    } else {
      for (int t = 0; t < inst.num_types(); ++t) {
        phase.per_type.push_back(
            analyze_signal_public(inst, phase.structure, t));
      }
      cache.emplace(values, phase.per_type);
    }
    std::vector<PairSet> next = explored;
    for (int w = 0; w < W; ++w) {
      const int sig = phase.signal_of_state[w];
      for (int t = 0; t < inst.num_types(); ++t) {
        for (int a : phase.per_type[t].explorable[sig]) next[w].insert({t, a});
      }
    }
    phase.explored_after = next;
    const bool unchanged = (next == explored);
    explored = std::move(next);
    result.phases.push_back(std::move(phase));
    if (unchanged) {
      result.stabilized_at = l;
      break;
    }
  }
  if (result.stabilized_at == 0) {
    throw ValidationError("explore", "public fixed point failed to stabilize");
  }
  result.stable = explored;
  // the policy runs a fixed number of exploration phases; phases past
  // stabilization repeat the stable structure
  while (static_cast<int>(result.phases.size()) < result.exploration_phases) {
    PublicPhase copy = result.phases.back();
    copy.structure.round_tag =
        "phase-" + std::to_string(result.phases.size() + 1);
    result.phases.push_back(std::move(copy));
  }
  return result;
}

PrivateAnalysis analyze_private(const Instance& inst, const Rat& delta,
                                std::size_t menu_cap) {
  if (delta < 0) throw ValidationError("delta", "must be >= 0");
  const int W = inst.num_states();
  PrivateAnalysis result;
  result.menus = enumerate_menus(inst, menu_cap);
  result.delta = delta;
  result.exploration_phases = static_cast<int>(result.menus.size());
  std::vector<std::set<int>> explored(W);
  const int hard_cap = result.exploration_phases * W + 2;

  std::map<std::vector<std::string>, SignalExplorability> cache;
  for (int l = 1; l <= hard_cap; ++l) {
    std::vector<std::string> values(W);
    for (int w = 0; w < W; ++w) {
      values[w] = render_private_signal(inst, result.menus, explored[w], w);
    }
    PrivatePhase phase;
    phase.structure = deterministic_structure(
        inst, values, "phase-" + std::to_string(l), &phase.signal_of_state);
    auto it = cache.find(values);
    if (it != cache.end()) {
      phase.menus = it->second;
    } else {
      phase.menus =
          analyze_signal_private(inst, phase.structure, result.menus, delta);
      cache.emplace(values, phase.menus);
    }
    std::vector<std::set<int>> next = explored;
    for (int w = 0; w < W; ++w) {
      const int sig = phase.signal_of_state[w];
      for (int m : phase.menus.explorable[sig]) next[w].insert(m);
    }
    phase.explored_after = next;
    const bool unchanged = (next == explored);
    explored = std::move(next);
    result.phases.push_back(std::move(phase));
    if (unchanged) {
      result.stabilized_at = l;
      break;
    }
  }
  if (result.stabilized_at == 0) {
    throw ValidationError("explore", "private fixed point failed to stabilize");
  }
  result.stable = explored;
  while (static_cast<int>(result.phases.size()) < result.exploration_phases) {
    PrivatePhase copy = result.phases.back();
    copy.structure.round_tag =
        "phase-" + std::to_string(result.phases.size() + 1);
    result.phases.push_back(std::move(copy));
  }
  return result;
}

std::vector<SignalStructure> enumerate_phase_signals(const Instance& inst,
                                                     Mode mode,
                                                     const Rat& delta) {
  std::vector<SignalStructure> out;
  if (mode == Mode::Public) {
    PublicAnalysis a = analyze_public(inst);
    for (int l = 0; l < a.exploration_phases; ++l) {
      out.push_back(a.phases[l].structure);
    }
  } else {
    PrivateAnalysis a = analyze_private(inst, delta);
    for (int l = 0; l < a.exploration_phases; ++l) {
      out.push_back(a.phases[l].structure);
    }
  }
  return out;
}

std::vector<PairSet> eventually_explorable_public(const Instance& inst) {
  return analyze_public(inst).stable;
}

std::vector<std::set<int>> eventually_explorable_private(const Instance& inst,
                                                         const Rat& delta) {
  return analyze_private(inst, delta).stable;
}

std::vector<PairSet> private_pairs(const Instance& inst, const Rat& delta) {
  PrivateAnalysis a = analyze_private(inst, delta);
  std::vector<PairSet> out(inst.num_states());
  for (int w = 0; w < inst.num_states(); ++w) {
    for (int m : a.stable[w]) {
      for (int t = 0; t < inst.num_types(); ++t) {
        out[w].insert({t, a.menus[m].action_of_type[t]});
      }
    }
  }
  return out;
}

Rat benchmark_opt(const Instance& inst, Mode mode, const Rat& delta) {
  Rat total = 0;
  if (mode == Mode::Public) {
    PublicAnalysis a = analyze_public(inst);
    for (int w = 0; w < inst.num_states(); ++w) {
      for (int t = 0; t < inst.num_types(); ++t) {
        bool have = false;
        Rat best = 0;
        for (const auto& [pt, pa] : a.stable[w]) {
          if (pt != t) continue;
          const Rat& u = inst.utility(t, pa, w);
          if (!have || u > best) {
            best = u;
            have = true;
          }
        }
        if (!have) {
          throw ValidationError("opt", "no explorable action for type " +
                                           inst.types()[t]);
        }
        total += inst.state_prior(w) * inst.type_prob(t) * best;
      }
    }
  } else {
    PrivateAnalysis a = analyze_private(inst, delta);
    for (int w = 0; w < inst.num_states(); ++w) {
      bool have = false;
      Rat best = 0;
      for (int m : a.stable[w]) {
        Rat value = 0;
        for (int t = 0; t < inst.num_types(); ++t) {
          value += inst.type_prob(t) *
                   inst.utility(t, a.menus[m].action_of_type[t], w);
        }
        if (!have || value > best) {
          best = value;
          have = true;
        }
      }
      if (!have) throw ValidationError("opt", "no explorable menu");
      total += inst.state_prior(w) * best;
    }
  }
  return total;
}

namespace {

std::vector<LabelPairSet> to_labels(const Instance& inst,
                                    const std::vector<PairSet>& pairs) {
  std::vector<LabelPairSet> out(pairs.size());
  for (std::size_t w = 0; w < pairs.size(); ++w) {
    for (const auto& [t, a] : pairs[w]) {
      out[w].insert({inst.types()[t], inst.actions()[a]});
    }
  }
  return out;
}

}  // namespace

StaticsReport comparative_statics(const Instance& inst,
                                  const std::map<std::string, Rat>& alt_dist) {
  Rat sum = 0;
  for (const auto& [label, p] : alt_dist) {
    inst.type_index(label);  // throws on unknown labels
    if (p <= 0) {
      throw ValidationError("type_dist." + label, "weight must be positive");
    }
    sum += p;
  }
  if (sum != 1) {
    throw ValidationError("type_dist", "prior sums to " + rat_to_string(sum));
  }

  // restricted instance in canonical type order
  std::vector<std::string> alt_types;
  std::vector<Rat> alt_probs;
  for (int t = 0; t < inst.num_types(); ++t) {
    auto it = alt_dist.find(inst.types()[t]);
    if (it == alt_dist.end()) continue;
    alt_types.push_back(inst.types()[t]);
    alt_probs.push_back(it->second);
  }
  std::vector<Rat> alt_utility;
  for (const auto& label : alt_types) {
    const int t = inst.type_index(label);
    for (int a = 0; a < inst.num_actions(); ++a) {
      for (int w = 0; w < inst.num_states(); ++w) {
        alt_utility.push_back(inst.utility(t, a, w));
      }
    }
  }
  std::vector<Rat> prior;
  for (int w = 0; w < inst.num_states(); ++w) prior.push_back(inst.state_prior(w));
  Instance alt(inst.states(), alt_types, inst.actions(), prior, alt_probs,
               alt_utility);

  StaticsReport report;
  report.same_support = (alt_types.size() == inst.types().size());
  report.support_subset = !report.same_support;

  report.public_full = to_labels(inst, eventually_explorable_public(inst));
  report.public_alt = to_labels(alt, eventually_explorable_public(alt));
  report.private_full = to_labels(inst, private_pairs(inst, 0));
  report.private_alt = to_labels(alt, private_pairs(alt, 0));

  report.public_claim_ok = true;
  for (int w = 0; w < inst.num_states(); ++w) {
    if (report.same_support) {
      if (report.public_alt[w] != report.public_full[w]) {
        report.public_claim_ok = false;
        report.notes.push_back("public sets differ in state " +
                               inst.states()[w]);
      }
    } else {
      if (!std::includes(report.public_full[w].begin(),
                         report.public_full[w].end(),
                         report.public_alt[w].begin(),
                         report.public_alt[w].end())) {
        report.public_claim_ok = false;
        report.notes.push_back("restricted public set not contained in state " +
                               inst.states()[w]);
      }
    }
  }
  return report;
}

MonotonicityReport check_information_monotonicity(const Instance& inst,
                                                  const StateSignalJoint& joint,
                                                  Mode mode, const Rat& delta) {
  const int W = inst.num_states();
  const int NS = static_cast<int>(joint.s_support.size());
  const int NP = static_cast<int>(joint.sp_support.size());
  if (static_cast<int>(joint.mass.size()) != W) {
    throw ValidationError("joint", "wrong state dimension");
  }

  FiniteJoint fj({"omega", "S", "Sprime"},
                 {inst.states(), joint.s_support, joint.sp_support});
  for (int w = 0; w < W; ++w) {
    for (int i = 0; i < NS; ++i) {
      for (int j = 0; j < NP; ++j) {
        if (joint.mass[w][i][j] != 0) {
          fj.add_mass({w, i, j}, joint.mass[w][i][j]);
        }
      }
    }
  }
  fj.validate();

  MonotonicityReport report;
  CmiResult cmi = conditional_mutual_information(fj, {2}, {0}, {1});
  report.mi = cmi.value;
  report.exact_zero = cmi.exact_zero;
  const Rat budget = delta * delta / 8;
  report.applicable =
      cmi.exact_zero ||
      (mode == Mode::Private && Rat(0) < budget &&
       cmi.value <= rat_to_double(budget));
  if (!report.applicable) return report;

  // marginal structures, dropping zero-mass signals
  auto build = [&](bool prime) {
    SignalStructure s;
    std::vector<int> remap(prime ? NP : NS, -1);
    const auto& labels = prime ? joint.sp_support : joint.s_support;
    std::vector<Rat> marg(labels.size(), Rat(0));
    for (int w = 0; w < W; ++w) {
      for (int i = 0; i < NS; ++i) {
        for (int j = 0; j < NP; ++j) {
          marg[prime ? j : i] += joint.mass[w][i][j];
        }
      }
    }
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (marg[k] > 0) {
        remap[k] = static_cast<int>(s.support.size());
        s.support.push_back(labels[k]);
      }
    }
    s.joint.assign(W, std::vector<Rat>(s.support.size(), Rat(0)));
    for (int w = 0; w < W; ++w) {
      for (int i = 0; i < NS; ++i) {
        for (int j = 0; j < NP; ++j) {
          const int k = prime ? remap[j] : remap[i];
          if (k >= 0) s.joint[w][k] += joint.mass[w][i][j];
        }
      }
    }
    s.round_tag = prime ? "Sprime" : "S";
    validate_signal_structure(inst, s);
    return std::make_pair(s, remap);
  };
  auto [s_struct, s_remap] = build(false);
  auto [sp_struct, sp_remap] = build(true);

  std::vector<Menu> menus;
  std::vector<SignalExplorability> ex_s, ex_sp;  // per type for public
  SignalExplorability exm_s, exm_sp;
  if (mode == Mode::Public) {
    for (int t = 0; t < inst.num_types(); ++t) {
      ex_s.push_back(analyze_signal_public(inst, s_struct, t));
      ex_sp.push_back(analyze_signal_public(inst, sp_struct, t));
    }
  } else {
    menus = enumerate_menus(inst);
    exm_s = analyze_signal_private(inst, s_struct, menus, delta);
    exm_sp = analyze_signal_private(inst, sp_struct, menus, 0);
  }

  report.containment_ok = true;
  for (int i = 0; i < NS; ++i) {
    for (int j = 0; j < NP; ++j) {
      Rat mass = 0;
      for (int w = 0; w < W; ++w) mass += joint.mass[w][i][j];
      if (mass == 0) continue;
      const int si = s_remap[i];
      const int sj = sp_remap[j];
      if (mode == Mode::Public) {
        for (int t = 0; t < inst.num_types(); ++t) {
          for (int a : ex_sp[t].explorable[sj]) {
            if (!ex_s[t].explorable[si].count(a)) {
              report.containment_ok = false;
              report.witnesses.push_back(
                  "type " + inst.types()[t] + " action " + inst.actions()[a] +
                  " explorable at s'=" + joint.sp_support[j] +
                  " but not at s=" + joint.s_support[i]);
            }
          }
        }
      } else {
        for (int m : exm_sp.explorable[sj]) {
          if (!exm_s.explorable[si].count(m)) {
            report.containment_ok = false;
            report.witnesses.push_back(
                "menu " + menu_to_string(inst, menus[m]) + " explorable at s'=" +
                joint.sp_support[j] + " but not at s=" + joint.s_support[i]);
          }
        }
      }
    }
  }
  return report;
}

}  // namespace bexplore
