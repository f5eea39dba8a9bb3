#include "bexplore/policies.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "bexplore/error.hpp"

namespace bexplore {

RunSeeds derive_run_seeds(std::uint64_t master_seed, std::uint64_t run_index) {
  const std::uint64_t run_seed = derive_seed(master_seed, run_index);
  return {derive_seed(run_seed, 1), derive_seed(run_seed, 2),
          derive_seed(run_seed, 3)};
}

std::optional<Rat> conditional_min_margin_action(
    const Instance& inst, const std::vector<Rat>& likelihood, int type,
    int action) {
  Rat den = 0;
  for (int w = 0; w < inst.num_states(); ++w) {
    den += inst.state_prior(w) * likelihood[w];
  }
  if (den == 0) return std::nullopt;
  bool have = false;
  Rat best = 0;
  for (int ap = 0; ap < inst.num_actions(); ++ap) {
    if (ap == action) continue;
    Rat num = 0;
    for (int w = 0; w < inst.num_states(); ++w) {
      num += inst.state_prior(w) * likelihood[w] *
             (inst.utility(type, action, w) - inst.utility(type, ap, w));
    }
    const Rat margin = num / den;
    if (!have || margin < best) {
      best = margin;
      have = true;
    }
  }
  return have ? best : Rat(0);
}

std::optional<Rat> conditional_min_margin_menu(
    const Instance& inst, const std::vector<Rat>& likelihood,
    const std::vector<int>& menu_actions) {
  bool have = false;
  Rat best = 0;
  for (int t = 0; t < inst.num_types(); ++t) {
    auto margin =
        conditional_min_margin_action(inst, likelihood, t, menu_actions[t]);
    if (!margin) return std::nullopt;
    if (!have || *margin < best) {
      best = *margin;
      have = true;
    }
  }
  return have ? best : Rat(0);
}

namespace {

int argmax_rat(const std::vector<Rat>& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<int> draw_type_stream(const Instance& inst, long horizon,
                                  const std::vector<int>* explicit_types,
                                  Rng& type_rng) {
  std::vector<int> types;
  if (explicit_types) {
    if (static_cast<long>(explicit_types->size()) < horizon) {
      throw ValidationError("type_stream", "fewer entries than rounds");
    }
    for (long t = 0; t < horizon; ++t) {
      const int ty = (*explicit_types)[t];
      if (ty < 0 || ty >= inst.num_types()) {
        throw ValidationError("type_stream", "type index out of range");
      }
      types.push_back(ty);
    }
    return types;
  }
  std::vector<Rat> weights;
  for (int t = 0; t < inst.num_types(); ++t) {
    weights.push_back(inst.type_prob(t));
  }
  types.reserve(horizon);
  for (long t = 0; t < horizon; ++t) {
    types.push_back(static_cast<int>(type_rng.sample_categorical(weights)));
  }
  return types;
}

// Shared machinery of the public policy and of its simulated copy inside
// the reported policy: per-context message likelihoods and exact margins.
class PublicEngine {
 public:
  PublicEngine(const Instance& inst, const PublicAnalysis& a)
      : inst_(inst), a_(a) {
    for (int t = 0; t < inst.num_types(); ++t) {
      lengths_.push_back(required_length_public(inst, a, t));
    }
    for (int t = 0; t < inst_.num_types(); ++t) {
      std::vector<Rat> values;
      for (int ac = 0; ac < inst_.num_actions(); ++ac) {
        values.push_back(expected_utility_prior(inst_, t, ac));
      }
      prior_myopic_.push_back(argmax_rat(values));
    }
  }

  const Instance& inst() const { return inst_; }
  const PublicAnalysis& analysis() const { return a_; }
  int phases() const { return a_.exploration_phases; }
  long length(int type) const { return lengths_[type]; }
  const PublicPhase& phase(int l) const { return a_.phases[l - 1]; }
  int prior_myopic(int type) const { return prior_myopic_[type]; }

  // best explored action given the knowledge at the start of phase l
  int filler_rec(int phase_l, int type, int state) const {
    if (phase_l <= 1) return prior_myopic_[type];
    const int rec =
        best_explored(a_.phases[phase_l - 2].explored_after[state], type, state);
    return rec < 0 ? prior_myopic_[type] : rec;
  }

  int exploit_rec(int type, int state) const {
    const int rec = best_explored(a_.stable[state], type, state);
    if (rec < 0) throw ValidationError("policy", "no explored action");
    return rec;
  }

  std::vector<Rat> exploration_likelihood(int phase_l, int type,
                                          int action) const {
    const PublicPhase& ph = phase(phase_l);
    std::vector<Rat> like(inst_.num_states());
    for (int w = 0; w < inst_.num_states(); ++w) {
      like[w] = ph.per_type[type].pimax.table[ph.signal_of_state[w]][action];
    }
    return like;
  }

  std::vector<Rat> filler_likelihood(int phase_l, int type, int action) const {
    std::vector<Rat> like(inst_.num_states(), Rat(0));
    for (int w = 0; w < inst_.num_states(); ++w) {
      if (filler_rec(phase_l, type, w) == action) like[w] = 1;
    }
    return like;
  }

  std::vector<Rat> exploit_likelihood(int type, int action) const {
    std::vector<Rat> like(inst_.num_states(), Rat(0));
    for (int w = 0; w < inst_.num_states(); ++w) {
      if (exploit_rec(type, w) == action) like[w] = 1;
    }
    return like;
  }

  // likelihood of the simulated recommendation a-hat in the reported mode
  std::vector<Rat> sim_likelihood(bool exploration_pos, int phase_l, int guess,
                                  int ahat) const {
    if (exploration_pos) return exploration_likelihood(phase_l, guess, ahat);
    if (phase_l <= phases()) return filler_likelihood(phase_l, guess, ahat);
    return exploit_likelihood(guess, ahat);
  }

  // menu shown in a reported-mode round: the guessed type gets a-hat, every
  // other type the best action conditioned on the prior and the event that
  // a-hat was recommended
  std::vector<int> reported_menu(const std::vector<Rat>& likelihood, int guess,
                                 int ahat) const {
    std::vector<int> menu(inst_.num_types());
    menu[guess] = ahat;
    for (int t = 0; t < inst_.num_types(); ++t) {
      if (t == guess) continue;
      std::vector<Rat> values(inst_.num_actions(), Rat(0));
      for (int ac = 0; ac < inst_.num_actions(); ++ac) {
        for (int w = 0; w < inst_.num_states(); ++w) {
          values[ac] +=
              inst_.state_prior(w) * likelihood[w] * inst_.utility(t, ac, w);
        }
      }
      menu[t] = argmax_rat(values);
    }
    return menu;
  }

  Rat exploration_margin(int phase_l, int type, int action) {
    return cached_action_margin(exploration_margins_, {phase_l, type, action},
                                exploration_likelihood(phase_l, type, action),
                                type, action);
  }
  Rat filler_margin(int phase_l, int type, int action) {
    return cached_action_margin(filler_margins_, {phase_l, type, action},
                                filler_likelihood(phase_l, type, action), type,
                                action);
  }
  Rat exploit_margin(int type, int action) {
    return cached_action_margin(exploit_margins_, {0, type, action},
                                exploit_likelihood(type, action), type, action);
  }

  Rat reported_margin(bool exploration_pos, int phase_l, int guess, int ahat,
                      const std::vector<int>& menu) {
    const auto key = std::make_tuple(exploration_pos ? phase_l : -phase_l,
                                     guess, ahat);
    auto it = menu_margins_.find(key);
    if (it != menu_margins_.end()) return it->second;
    auto margin = conditional_min_margin_menu(
        inst_, sim_likelihood(exploration_pos, phase_l, guess, ahat), menu);
    if (!margin) throw ValidationError("audit", "message has zero probability");
    menu_margins_.emplace(key, *margin);
    return *margin;
  }

 private:
  Rat cached_action_margin(std::map<std::tuple<int, int, int>, Rat>& cache,
                           std::tuple<int, int, int> key,
                           const std::vector<Rat>& likelihood, int type,
                           int action) {
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto margin =
        conditional_min_margin_action(inst_, likelihood, type, action);
    if (!margin) throw ValidationError("audit", "message has zero probability");
    cache.emplace(key, *margin);
    return *margin;
  }

  int best_explored(const PairSet& pairs, int type, int state) const {
    int best = -1;
    for (const auto& [t, ac] : pairs) {
      if (t != type) continue;
      if (best < 0 ||
          inst_.utility(type, ac, state) > inst_.utility(type, best, state)) {
        best = ac;
      }
    }
    return best;
  }

  const Instance& inst_;
  const PublicAnalysis& a_;
  std::vector<long> lengths_;
  std::vector<int> prior_myopic_;
  std::map<std::tuple<int, int, int>, Rat> exploration_margins_;
  std::map<std::tuple<int, int, int>, Rat> filler_margins_;
  std::map<std::tuple<int, int, int>, Rat> exploit_margins_;
  std::map<std::tuple<int, int, int>, Rat> menu_margins_;
};

// Per-type thread state of the public policy (or its simulated copy).
struct ThreadState {
  std::vector<int> sequence;
  long position = 0;  // rounds of this type in the current phase
  int sequence_phase = 0;
};

struct PublicSim {
  explicit PublicSim(PublicEngine& engine, int state,
                     std::uint64_t policy_seed)
      : engine(engine),
        state(state),
        policy_seed(policy_seed),
        threads(engine.inst().num_types()) {}

  // Recommendation the policy issues for `type` in the current phase at its
  // next position; does not advance the thread.
  struct Rec {
    int action;
    bool exploration_pos;  // true: MaxExplore position, false: filler/exploit
  };

  Rec peek(int type) {
    if (phase_l > engine.phases()) {
      return {engine.exploit_rec(type, state), false};
    }
    ThreadState& th = threads[type];
    if (th.sequence_phase != phase_l) {
      // per-(phase, type) substream so that sequence generation is
      // independent of arrival order
      Rng rng(derive_seed(policy_seed,
                          static_cast<std::uint64_t>(phase_l) *
                                  engine.inst().num_types() +
                              type));
      const PublicPhase& ph = engine.phase(phase_l);
      const int sig = ph.signal_of_state[state];
      th.sequence = max_explore_public(ph.per_type[type].pimax, sig,
                                       engine.length(type), rng)
                        .items;
      th.position = 0;
      th.sequence_phase = phase_l;
    }
    if (th.position < static_cast<long>(th.sequence.size())) {
      return {th.sequence[static_cast<std::size_t>(th.position)], true};
    }
    return {engine.filler_rec(phase_l, type, state), false};
  }

  // Advances the thread for `type` after a consumed round; returns true
  // when this round completed the phase.
  bool advance(int type) {
    if (phase_l > engine.phases()) return false;
    ThreadState& th = threads[type];
    // peek() is always called first, so the sequence exists
    th.position += 1;
    observed.insert({type, peeked_action_for_observation(type)});
    for (int t = 0; t < engine.inst().num_types(); ++t) {
      if (threads[t].sequence_phase != phase_l ||
          threads[t].position < engine.length(t)) {
        return false;
      }
    }
    return true;
  }

  void start_new_phase() {
    phase_l += 1;
  }

  // the action just consumed at the pre-advance position
  int peeked_action_for_observation(int type) {
    ThreadState& th = threads[type];
    const long pos = th.position - 1;
    if (pos < static_cast<long>(th.sequence.size())) {
      return th.sequence[static_cast<std::size_t>(pos)];
    }
    return engine.filler_rec(phase_l, type, state);
  }

  PublicEngine& engine;
  int state;
  std::uint64_t policy_seed;
  int phase_l = 1;
  std::vector<ThreadState> threads;
  PairSet observed;
};

void check_phase_knowledge(const PublicSim& sim, Trace& trace) {
  // the realized knowledge must coincide with the idealized fixed point
  const auto& expected =
      sim.engine.analysis().phases[sim.phase_l - 1].explored_after[sim.state];
  if (sim.observed != expected) {
    throw ValidationError("policy",
                          "realized exploration diverged from the fixed point");
  }
  trace.explored_pairs_per_phase.push_back(sim.observed);
}

}  // namespace

Trace run_public_policy(const Instance& inst, const PublicAnalysis& a,
                        int state, long horizon, RunSeeds seeds,
                        const std::vector<int>* explicit_types) {
  if (horizon < 1) throw ValidationError("T", "must be >= 1");
  if (state < 0 || state >= inst.num_states()) {
    throw ValidationError("states", "index out of range");
  }
  PublicEngine engine(inst, a);
  PublicSim sim(engine, state, seeds.policy);

  Trace trace;
  trace.kind = PolicyKind::Public;
  trace.state = state;
  trace.horizon = horizon;
  trace.type_seed = seeds.types;
  trace.policy_seed = seeds.policy;
  trace.guess_seed = seeds.guess;

  Rng type_rng(seeds.types);
  const std::vector<int> types =
      draw_type_stream(inst, horizon, explicit_types, type_rng);

  for (long t = 1; t <= horizon; ++t) {
    const int type = types[t - 1];
    TraceRow row;
    row.round = t;
    row.type = type;
    row.phase = sim.phase_l;
    const bool exploring = sim.phase_l <= engine.phases();
    PublicSim::Rec rec = sim.peek(type);
    row.message_action = rec.action;
    row.action = rec.action;
    row.reward = inst.utility(type, rec.action, state);
    if (!exploring) {
      row.audit_margin = engine.exploit_margin(type, rec.action);
    } else if (rec.exploration_pos) {
      row.audit_margin = engine.exploration_margin(sim.phase_l, type, rec.action);
    } else {
      row.audit_margin = engine.filler_margin(sim.phase_l, type, rec.action);
    }
    trace.rows.push_back(std::move(row));

    if (exploring && sim.advance(type)) {
      check_phase_knowledge(sim, trace);
      sim.start_new_phase();
      trace.phases_completed = sim.phase_l - 1;
      if (sim.phase_l > engine.phases()) {
        trace.exploration_complete = true;
        trace.exploration_rounds = t;
      }
    }
  }
  if (!trace.exploration_complete) {
    trace.diagnostics.push_back(
        "exploration truncated: not every phase completed within T");
  }
  return trace;
}

Trace run_reported_policy(const Instance& inst, const PublicAnalysis& a,
                          int state, long horizon, RunSeeds seeds,
                          const std::vector<int>* explicit_types) {
  if (horizon < 1) throw ValidationError("T", "must be >= 1");
  if (state < 0 || state >= inst.num_states()) {
    throw ValidationError("states", "index out of range");
  }
  PublicEngine engine(inst, a);
  PublicSim sim(engine, state, seeds.policy);

  Trace trace;
  trace.kind = PolicyKind::Reported;
  trace.state = state;
  trace.horizon = horizon;
  trace.type_seed = seeds.types;
  trace.policy_seed = seeds.policy;
  trace.guess_seed = seeds.guess;

  Rng type_rng(seeds.types);
  Rng guess_rng(seeds.guess);
  const std::vector<int> types =
      draw_type_stream(inst, horizon, explicit_types, type_rng);

  for (long t = 1; t <= horizon; ++t) {
    const int type = types[t - 1];
    TraceRow row;
    row.round = t;
    row.type = type;
    row.phase = sim.phase_l;
    row.is_menu = true;

    const bool exploring = sim.phase_l <= engine.phases();
    if (exploring) {
      const int guess = static_cast<int>(
          guess_rng.uniform_index(static_cast<std::size_t>(inst.num_types())));
      PublicSim::Rec rec = sim.peek(guess);
      const std::vector<Rat> like =
          engine.sim_likelihood(rec.exploration_pos, sim.phase_l, guess,
                                rec.action);
      row.message_menu = engine.reported_menu(like, guess, rec.action);
      row.lucky = (guess == type);
      row.action = row.message_menu[type];
      row.reward = inst.utility(type, row.action, state);
      row.audit_margin = engine.reported_margin(
          rec.exploration_pos, sim.phase_l, guess, rec.action,
          row.message_menu);
      trace.rows.push_back(row);
      if (row.lucky && sim.advance(guess)) {
        check_phase_knowledge(sim, trace);
        sim.start_new_phase();
        trace.phases_completed = sim.phase_l - 1;
        if (sim.phase_l > engine.phases()) {
          trace.exploration_complete = true;
          trace.exploration_rounds = t;
        }
      }
    } else {
      std::vector<int> menu(inst.num_types());
      for (int ty = 0; ty < inst.num_types(); ++ty) {
        menu[ty] = engine.exploit_rec(ty, state);
      }
      row.message_menu = menu;
      row.lucky = true;
      row.action = menu[type];
      row.reward = inst.utility(type, row.action, state);
      // the exploitation menu is a deterministic function of the state
      std::vector<Rat> like(inst.num_states(), Rat(0));
      for (int w = 0; w < inst.num_states(); ++w) {
        bool same = true;
        for (int ty = 0; ty < inst.num_types() && same; ++ty) {
          same = (engine.exploit_rec(ty, w) == menu[ty]);
        }
        if (same) like[w] = 1;
      }
      auto margin = conditional_min_margin_menu(inst, like, menu);
      if (!margin) throw ValidationError("audit", "zero-probability menu");
      row.audit_margin = *margin;
      trace.rows.push_back(row);
    }
  }
  if (!trace.exploration_complete) {
    trace.diagnostics.push_back(
        "exploration truncated: not every phase completed within T");
  }
  return trace;
}

PrivateSchedule private_schedule(const Instance& inst, const PrivateAnalysis& a,
                                 long horizon) {
  if (a.delta <= 0) throw ValidationError("delta", "must be > 0");
  if (horizon < 1) throw ValidationError("T", "must be >= 1");
  const long M = static_cast<long>(a.menus.size());
  const Rat d2 = a.delta * a.delta;
  PrivateSchedule sched;
  const Rat second = (d2 / (32 * M)) * (d2 / (32 * M));
  if (inst.num_states() >= 2) {
    const Rat log_states = log2_upper(Rat(inst.num_states()));
    const Rat first = d2 / (16 * M * log_states);
    sched.gamma1 = std::min(first, second);
  } else {
    sched.gamma1 = second;
  }
  sched.gamma2 = Rat(1) / (Rat(horizon) * M);
  sched.gamma0 = std::min(sched.gamma1, sched.gamma2);
  sched.length = required_length_private(inst, a, sched.gamma0);
  sched.min_horizon = M * sched.length;
  return sched;
}

namespace {

// Exploitation menus of the private policy, one per posterior cell of the
// final (idealized) signal.
class PrivateExploit {
 public:
  PrivateExploit(const Instance& inst, const PrivateAnalysis& a)
      : inst_(inst) {
    const int W = inst.num_states();
    std::vector<std::string> value(W);
    for (int w = 0; w < W; ++w) {
      value[w] = render_private_signal(inst, a.menus, a.stable[w], w);
    }
    menu_of_state_.resize(W);
    for (int w = 0; w < W; ++w) {
      std::vector<int> cell;
      for (int wp = 0; wp < W; ++wp) {
        if (value[wp] == value[w]) cell.push_back(wp);
      }
      menu_of_state_[w] = cell_menu(cell);
    }
  }

  // per-type argmax of posterior-expected utility over the cell
  std::vector<int> cell_menu(const std::vector<int>& cell) const {
    std::vector<int> menu(inst_.num_types());
    for (int t = 0; t < inst_.num_types(); ++t) {
      std::vector<Rat> values(inst_.num_actions(), Rat(0));
      for (int ac = 0; ac < inst_.num_actions(); ++ac) {
        for (int w : cell) {
          values[ac] += inst_.state_prior(w) * inst_.utility(t, ac, w);
        }
      }
      menu[t] = argmax_rat(values);
    }
    return menu;
  }

  const std::vector<int>& menu_of_state(int w) const {
    return menu_of_state_[w];
  }

  std::vector<Rat> likelihood(const std::vector<int>& menu) const {
    std::vector<Rat> like(inst_.num_states(), Rat(0));
    for (int w = 0; w < inst_.num_states(); ++w) {
      if (menu_of_state_[w] == menu) like[w] = 1;
    }
    return like;
  }

 private:
  const Instance& inst_;
  std::vector<std::vector<int>> menu_of_state_;
};

}  // namespace

Trace run_private_policy(const Instance& inst, const PrivateAnalysis& a,
                         int state, long horizon, RunSeeds seeds,
                         const std::vector<int>* explicit_types) {
  if (state < 0 || state >= inst.num_states()) {
    throw ValidationError("states", "index out of range");
  }
  const PrivateSchedule sched = private_schedule(inst, a, horizon);
  if (horizon < sched.min_horizon) {
    throw ValidationError(
        "T", "horizon too small for exploration: need at least " +
                 std::to_string(sched.min_horizon) + " rounds (|M|*L)");
  }
  const int M = static_cast<int>(a.menus.size());
  const int W = inst.num_states();

  Trace trace;
  trace.kind = PolicyKind::Private;
  trace.state = state;
  trace.horizon = horizon;
  trace.delta = a.delta;
  trace.type_seed = seeds.types;
  trace.policy_seed = seeds.policy;
  trace.guess_seed = seeds.guess;

  Rng type_rng(seeds.types);
  const std::vector<int> types =
      draw_type_stream(inst, horizon, explicit_types, type_rng);

  std::vector<long> b1(M), b2(M);
  for (int m = 0; m < M; ++m) {
    b1[m] = sample_bound(inst, a.menus[m], sched.gamma1).count;
    b2[m] = sample_bound(inst, a.menus[m], sched.gamma2).count;
  }

  // margins per (phase, menu) context
  std::map<std::pair<int, int>, Rat> margins;
  auto exploration_margin = [&](int phase_l, int menu_idx) {
    const auto key = std::make_pair(phase_l, menu_idx);
    auto it = margins.find(key);
    if (it != margins.end()) return it->second;
    const PrivatePhase& ph = a.phases[phase_l - 1];
    std::vector<Rat> like(W);
    for (int w = 0; w < W; ++w) {
      like[w] = ph.menus.pimax.table[ph.signal_of_state[w]][menu_idx];
    }
    auto margin = conditional_min_margin_menu(
        inst, like, a.menus[menu_idx].action_of_type);
    if (!margin) throw ValidationError("audit", "zero-probability menu");
    margins.emplace(key, *margin);
    return *margin;
  };

  PrivateExploit exploit(inst, a);

  std::set<int> explored_runtime;
  std::map<int, TripleList> estimates;
  std::map<int, std::vector<std::pair<int, Rat>>> retained;
  int sig = a.phases[0].signal_of_state[state];  // phase 1: single signal
  long t = 0;

  for (int l = 1; l <= M && t < horizon; ++l) {
    Rng phase_rng(derive_seed(seeds.policy, static_cast<std::uint64_t>(l)));
    const PrivatePhase& ph = a.phases[l - 1];
    ExploreSequence mu =
        max_explore_private(ph.menus.pimax, sig, sched.length, phase_rng);
    std::map<int, std::vector<std::pair<int, Rat>>> phase_samples;
    for (long r = 0; r < sched.length; ++r) {
      t += 1;
      const int type = types[t - 1];
      const int menu_idx = mu.items[static_cast<std::size_t>(r)];
      const Menu& menu = a.menus[menu_idx];
      TraceRow row;
      row.round = t;
      row.type = type;
      row.phase = l;
      row.is_menu = true;
      row.message_menu = menu.action_of_type;
      row.action = menu.action_of_type[type];
      row.reward = inst.utility(type, row.action, state);
      row.audit_margin = exploration_margin(l, menu_idx);
      trace.rows.push_back(std::move(row));
      phase_samples[menu_idx].emplace_back(menu.action_of_type[type],
                                           inst.utility(type, menu.action_of_type[type], state));
    }
    // end of phase: estimate the outcome distribution of every menu
    // explored in this phase from its first B_m(gamma1) samples
    for (int m : ph.menus.explorable[sig]) {
      auto& samples = phase_samples[m];
      if (static_cast<long>(samples.size()) < b1[m]) {
        throw ValidationError("policy", "menu undersampled in phase");
      }
      std::vector<std::pair<int, Rat>> head(
          samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(b1[m]));
      TripleList est = estimate_triple_list(head, inst, a.menus[m]);
      est.source_menu = m;
      if (est.fallback) {
        trace.diagnostics.push_back("phase " + std::to_string(l) +
                                    ": estimation fallback for menu " +
                                    menu_to_string(inst, a.menus[m]));
      }
      estimates[m] = std::move(est);
      explored_runtime.insert(m);
      auto& all = retained[m];
      all.insert(all.end(), samples.begin(), samples.end());
    }
    // consistency projection: the next signal is the triple-list collection
    // of a consistent state (canonically first), capping the support at |W|
    int consistent = -1;
    for (int w = 0; w < W && consistent < 0; ++w) {
      bool ok = true;
      for (int m : explored_runtime) {
        if (!(estimates[m].dist == menu_outcome_distribution(inst, a.menus[m], w))) {
          ok = false;
          break;
        }
      }
      if (ok) consistent = w;
    }
    if (consistent < 0) {
      consistent = 0;
      trace.diagnostics.push_back("phase " + std::to_string(l) +
                                  ": no consistent state; projected onto " +
                                  inst.states()[0]);
      for (int m : explored_runtime) {
        estimates[m].dist = menu_outcome_distribution(inst, a.menus[m], 0);
        estimates[m].matched_state = 0;
      }
    }
    if (explored_runtime != a.phases[l - 1].explored_after[consistent]) {
      trace.diagnostics.push_back(
          "phase " + std::to_string(l) +
          ": realized exploration diverged from the fixed point");
    }
    if (l < M) sig = a.phases[l].signal_of_state[consistent];
    trace.phases_completed = l;
  }
  trace.exploration_complete = (trace.phases_completed == M);
  if (trace.exploration_complete) trace.exploration_rounds = t;

  if (t < horizon) {
    // first exploitation round: re-estimate with gamma2 confidence from the
    // freshest retained samples
    for (int m : explored_runtime) {
      const auto& all = retained[m];
      if (static_cast<long>(all.size()) < b2[m]) {
        throw ValidationError("policy", "not enough retained samples");
      }
      std::vector<std::pair<int, Rat>> tail(
          all.end() - static_cast<std::ptrdiff_t>(b2[m]), all.end());
      TripleList est = estimate_triple_list(tail, inst, a.menus[m]);
      est.source_menu = m;
      if (est.fallback) {
        trace.diagnostics.push_back("exploitation: estimation fallback for menu " +
                                    menu_to_string(inst, a.menus[m]));
      }
      estimates[m] = std::move(est);
    }
    std::vector<int> cell;
    for (int w = 0; w < W; ++w) {
      bool ok = true;
      for (int m : explored_runtime) {
        if (!(estimates[m].dist ==
              menu_outcome_distribution(inst, a.menus[m], w))) {
          ok = false;
          break;
        }
      }
      if (ok) cell.push_back(w);
    }
    if (cell.empty()) {
      trace.diagnostics.push_back(
          "exploitation: no consistent state; projected onto " +
          inst.states()[0]);
      cell.push_back(0);
    }
    const std::vector<int> menu = exploit.cell_menu(cell);
    auto margin = conditional_min_margin_menu(inst, exploit.likelihood(menu), menu);
    if (!margin) {
      // estimation diverged from the idealized exploitation map
      trace.diagnostics.push_back(
          "exploitation: realized menu outside the idealized map");
    }
    while (t < horizon) {
      t += 1;
      const int type = types[t - 1];
      TraceRow row;
      row.round = t;
      row.type = type;
      row.phase = M + 1;
      row.is_menu = true;
      row.message_menu = menu;
      row.action = menu[type];
      row.reward = inst.utility(type, row.action, state);
      row.audit_margin = margin ? *margin : Rat(-1);
      trace.rows.push_back(std::move(row));
    }
  }
  return trace;
}

Trace run_public_policy(const Instance& inst, int state, long horizon,
                        std::uint64_t seed) {
  PublicAnalysis a = analyze_public(inst);
  return run_public_policy(inst, a, state, horizon,
                           derive_run_seeds(seed, 0));
}

Trace run_reported_policy(const Instance& inst, int state, long horizon,
                          std::uint64_t seed) {
  PublicAnalysis a = analyze_public(inst);
  return run_reported_policy(inst, a, state, horizon,
                             derive_run_seeds(seed, 0));
}

Trace run_private_policy(const Instance& inst, const Rat& delta, int state,
                         long horizon, std::uint64_t seed) {
  PrivateAnalysis a = analyze_private(inst, delta);
  return run_private_policy(inst, a, state, horizon,
                            derive_run_seeds(seed, 0));
}

TripleList estimate_triple_list(const std::vector<std::pair<int, Rat>>& samples,
                                const Instance& inst, const Menu& m) {
  if (samples.empty()) throw ValidationError("samples", "empty sample list");
  TripleList result;

  std::vector<OutcomeDistribution> dists;
  bool degenerate = true;
  for (int w = 0; w < inst.num_states(); ++w) {
    dists.push_back(menu_outcome_distribution(inst, m, w));
    if (!(dists[w] == dists[0])) degenerate = false;
  }
  if (degenerate) {
    result.dist = dists[0];
    result.matched_state = 0;
    return result;
  }

  std::map<std::pair<int, Rat>, Rat> freq;
  const Rat n(static_cast<long>(samples.size()));
  for (const auto& s : samples) freq[s] += 1 / n;

  const Rat half_sep = menu_separation(inst, m) / 2;
  std::set<std::pair<int, Rat>> support_union;
  for (const auto& d : dists) {
    for (const auto& atom : d.atoms) {
      support_union.insert({atom.action, atom.reward});
    }
  }
  for (int w = 0; w < inst.num_states(); ++w) {
    bool ok = true;
    for (const auto& u : support_union) {
      Rat q = 0;
      for (const auto& atom : dists[w].atoms) {
        if (std::make_pair(atom.action, atom.reward) == u) q = atom.prob;
      }
      auto it = freq.find(u);
      const Rat qhat = (it == freq.end()) ? Rat(0) : it->second;
      if (abs(q - qhat) > half_sep) {
        ok = false;
        break;
      }
    }
    if (ok) {
      result.dist = dists[w];
      result.matched_state = w;
      return result;
    }
  }
  result.dist = dists[0];
  result.matched_state = 0;
  result.fallback = true;
  return result;
}

RewardSummary total_reward(const Trace& trace) {
  RewardSummary summary;
  for (const auto& row : trace.rows) summary.total += row.reward;
  if (!trace.rows.empty()) {
    summary.mean = summary.total / Rat(static_cast<long>(trace.rows.size()));
  }
  return summary;
}

namespace {

class AuditContext {
 public:
  AuditContext(const Trace& trace, const Instance& inst)
      : trace_(trace), inst_(inst) {
    report_.threshold =
        trace.kind == PolicyKind::Private ? Rat(-trace.delta) : Rat(0);
  }

  AuditReport run() {
    switch (trace_.kind) {
      case PolicyKind::Public:
        audit_public();
        break;
      case PolicyKind::Reported:
        audit_reported();
        break;
      case PolicyKind::Private:
        audit_private();
        break;
    }
    report_.ok = report_.violations.empty();
    return std::move(report_);
  }

 private:
  void violation(const TraceRow& row, const Rat& margin,
                 const std::string& note) {
    report_.violations.push_back({row.round, margin, note});
  }

  void record_margin(const TraceRow& row, const std::optional<Rat>& margin) {
    report_.rounds_checked += 1;
    if (!margin) {
      violation(row, report_.threshold - 1,
                "message has zero probability under replay");
      return;
    }
    if (*margin != row.audit_margin) {
      violation(row, *margin, "recorded margin differs from replay");
    }
    if (report_.rounds_checked == 1 || *margin < report_.min_margin) {
      report_.min_margin = *margin;
    }
    if (*margin < report_.threshold) {
      violation(row, *margin, "margin below threshold");
    }
  }

  bool check_obedience(const TraceRow& row, bool menu_expected) {
    if (row.is_menu != menu_expected) {
      violation(row, report_.threshold - 1, "message kind mismatch");
      return false;
    }
    if (row.type < 0 || row.type >= inst_.num_types()) {
      violation(row, report_.threshold - 1, "type index out of range");
      return false;
    }
    if (row.is_menu) {
      if (static_cast<int>(row.message_menu.size()) != inst_.num_types()) {
        violation(row, report_.threshold - 1, "menu arity mismatch");
        return false;
      }
      for (int ac : row.message_menu) {
        if (ac < 0 || ac >= inst_.num_actions()) {
          violation(row, report_.threshold - 1, "menu action out of range");
          return false;
        }
      }
    } else if (row.message_action < 0 ||
               row.message_action >= inst_.num_actions()) {
      violation(row, report_.threshold - 1, "action out of range");
      return false;
    }
    const int expected_action =
        row.is_menu ? row.message_menu.at(row.type) : row.message_action;
    if (row.action != expected_action) {
      violation(row, report_.threshold - 1, "agent action deviates from message");
      return false;
    }
    if (row.reward != inst_.utility(row.type, row.action, trace_.state)) {
      violation(row, report_.threshold - 1, "reward differs from utility table");
      return false;
    }
    return true;
  }

  void audit_public() {
    PublicAnalysis a = analyze_public(inst_);
    PublicEngine engine(inst_, a);
    int phase_l = 1;
    std::vector<long> pos(inst_.num_types(), 0);
    for (const auto& row : trace_.rows) {
      if (!check_obedience(row, false)) continue;
      if (row.phase != phase_l) {
        violation(row, report_.threshold - 1, "phase index mismatch");
        continue;
      }
      const bool exploring = phase_l <= engine.phases();
      std::optional<Rat> margin;
      if (!exploring) {
        margin = conditional_min_margin_action(
            inst_, engine.exploit_likelihood(row.type, row.message_action),
            row.type, row.message_action);
      } else {
        pos[row.type] += 1;
        const bool exploration_pos = pos[row.type] <= engine.length(row.type);
        margin = conditional_min_margin_action(
            inst_,
            exploration_pos
                ? engine.exploration_likelihood(phase_l, row.type,
                                                row.message_action)
                : engine.filler_likelihood(phase_l, row.type,
                                           row.message_action),
            row.type, row.message_action);
        bool done = true;
        for (int t = 0; t < inst_.num_types(); ++t) {
          if (pos[t] < engine.length(t)) done = false;
        }
        if (done) {
          phase_l += 1;
          std::fill(pos.begin(), pos.end(), 0);
        }
      }
      record_margin(row, margin);
    }
  }

  void audit_reported() {
    PublicAnalysis a = analyze_public(inst_);
    PublicEngine engine(inst_, a);
    Rng guess_rng(trace_.guess_seed);
    int phase_l = 1;
    std::vector<long> pos(inst_.num_types(), 0);
    for (const auto& row : trace_.rows) {
      if (!check_obedience(row, true)) continue;
      if (row.phase != phase_l) {
        violation(row, report_.threshold - 1, "phase index mismatch");
        continue;
      }
      const bool exploring = phase_l <= engine.phases();
      std::optional<Rat> margin;
      if (!exploring) {
        std::vector<Rat> like(inst_.num_states(), Rat(0));
        for (int w = 0; w < inst_.num_states(); ++w) {
          bool same = true;
          for (int t = 0; t < inst_.num_types() && same; ++t) {
            same = (engine.exploit_rec(t, w) == row.message_menu[t]);
          }
          if (same) like[w] = 1;
        }
        margin = conditional_min_margin_menu(inst_, like, row.message_menu);
      } else {
        const int guess = static_cast<int>(guess_rng.uniform_index(
            static_cast<std::size_t>(inst_.num_types())));
        const bool lucky = (guess == row.type);
        if (lucky != row.lucky) {
          violation(row, report_.threshold - 1, "lucky flag mismatch");
          continue;
        }
        const int ahat = row.message_menu[guess];
        const bool exploration_pos = pos[guess] < engine.length(guess);
        std::vector<Rat> like =
            engine.sim_likelihood(exploration_pos, phase_l, guess, ahat);
        margin = conditional_min_margin_menu(inst_, like, row.message_menu);
        if (lucky) {
          pos[guess] += 1;
          bool done = true;
          for (int t = 0; t < inst_.num_types(); ++t) {
            if (pos[t] < engine.length(t)) done = false;
          }
          if (done) {
            phase_l += 1;
            std::fill(pos.begin(), pos.end(), 0);
          }
        }
      }
      record_margin(row, margin);
    }
  }

  void audit_private() {
    PrivateAnalysis a = analyze_private(inst_, trace_.delta);
    const PrivateSchedule sched = private_schedule(inst_, a, trace_.horizon);
    PrivateExploit exploit(inst_, a);
    const int M = static_cast<int>(a.menus.size());
    const int W = inst_.num_states();
    // menu index lookup
    std::map<std::vector<int>, int> menu_index;
    for (int m = 0; m < M; ++m) menu_index[a.menus[m].action_of_type] = m;

    for (const auto& row : trace_.rows) {
      if (!check_obedience(row, true)) continue;
      const long expected_phase =
          (row.round - 1) / sched.length < M ? (row.round - 1) / sched.length + 1
                                             : M + 1;
      if (row.phase != expected_phase) {
        violation(row, report_.threshold - 1, "phase index mismatch");
        continue;
      }
      std::optional<Rat> margin;
      if (row.phase <= M) {
        auto it = menu_index.find(row.message_menu);
        if (it == menu_index.end()) {
          violation(row, report_.threshold - 1, "unknown menu");
          continue;
        }
        const PrivatePhase& ph = a.phases[row.phase - 1];
        std::vector<Rat> like(W);
        for (int w = 0; w < W; ++w) {
          like[w] = ph.menus.pimax.table[ph.signal_of_state[w]][it->second];
        }
        margin = conditional_min_margin_menu(inst_, like, row.message_menu);
      } else {
        margin = conditional_min_margin_menu(
            inst_, exploit.likelihood(row.message_menu), row.message_menu);
      }
      record_margin(row, margin);
    }
  }

  const Trace& trace_;
  const Instance& inst_;
  AuditReport report_;
};

}  // namespace

AuditReport audit_bic(const Trace& trace, const Instance& inst) {
  return AuditContext(trace, inst).run();
}

}  // namespace bexplore
