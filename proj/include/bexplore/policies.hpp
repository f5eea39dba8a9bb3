#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bexplore/explore.hpp"
#include "bexplore/instance.hpp"
#include "bexplore/maxexplore.hpp"
#include "bexplore/rng.hpp"

namespace bexplore {

enum class PolicyKind { Public, Reported, Private };

struct TraceRow {
  long round = 0;  // 1-based
  int type = -1;
  bool is_menu = false;
  int message_action = -1;        // public mode: the bare action
  std::vector<int> message_menu;  // reported/private: action per type
  int action = -1;
  Rat reward;
  int phase = 0;
  bool lucky = true;
  Rat audit_margin;
};

struct Trace {
  PolicyKind kind = PolicyKind::Public;
  int state = 0;
  long horizon = 0;
  Rat delta = 0;
  std::uint64_t type_seed = 0, policy_seed = 0, guess_seed = 0;
  std::vector<TraceRow> rows;
  long exploration_rounds = -1;  // -1 when exploration never completed
  int phases_completed = 0;
  bool exploration_complete = false;
  std::vector<PairSet> explored_pairs_per_phase;  // public/reported
  std::vector<std::string> diagnostics;
  std::string instance_path;
};

// Stream seeds for one run, derived from (master seed, run index).
struct RunSeeds {
  std::uint64_t types = 0, policy = 0, guess = 0;
};
RunSeeds derive_run_seeds(std::uint64_t master_seed, std::uint64_t run_index);

// The gamma schedule of the private policy.
struct PrivateSchedule {
  Rat gamma1, gamma2, gamma0;
  long length = 0;           // L
  long min_horizon = 0;      // |M| * L
};
PrivateSchedule private_schedule(const Instance& inst, const PrivateAnalysis& a,
                                 long horizon);

Trace run_public_policy(const Instance& inst, const PublicAnalysis& a,
                        int state, long horizon, RunSeeds seeds,
                        const std::vector<int>* explicit_types = nullptr);

Trace run_reported_policy(const Instance& inst, const PublicAnalysis& a,
                          int state, long horizon, RunSeeds seeds,
                          const std::vector<int>* explicit_types = nullptr);

Trace run_private_policy(const Instance& inst, const PrivateAnalysis& a,
                         int state, long horizon, RunSeeds seeds,
                         const std::vector<int>* explicit_types = nullptr);

// Convenience wrappers that build the analysis in place.
Trace run_public_policy(const Instance& inst, int state, long horizon,
                        std::uint64_t seed);
Trace run_reported_policy(const Instance& inst, int state, long horizon,
                          std::uint64_t seed);
Trace run_private_policy(const Instance& inst, const Rat& delta, int state,
                         long horizon, std::uint64_t seed);

// Estimated outcome distribution of a menu, matched to a consistent state.
struct TripleList {
  OutcomeDistribution dist;
  int source_menu = -1;
  int matched_state = -1;
  bool fallback = false;  // no state within delta_m/2; canonical-first used
};

TripleList estimate_triple_list(const std::vector<std::pair<int, Rat>>& samples,
                                const Instance& inst, const Menu& m);

struct AuditViolation {
  long round = 0;
  Rat margin;
  std::string note;
};

struct AuditReport {
  bool ok = true;
  Rat threshold = 0;  // 0 for public/reported, -delta for private
  Rat min_margin = 0;
  long rounds_checked = 0;
  std::vector<AuditViolation> violations;
};

// Replays the per-round message distribution conditioned on each state and
// recomputes every margin from scratch; flags obedience breaks, infeasible
// messages, margin mismatches, and margins below the threshold.
AuditReport audit_bic(const Trace& trace, const Instance& inst);

struct RewardSummary {
  Rat total = 0;
  Rat mean = 0;
};
RewardSummary total_reward(const Trace& trace);

void write_trace_csv(const Trace& trace, const Instance& inst,
                     std::ostream& out);
Trace read_trace_csv(std::istream& in, const Instance& inst);

// Exact conditional expected-utility margins given a per-state message
// likelihood. Returns nothing when the message has zero probability.
std::optional<Rat> conditional_min_margin_action(
    const Instance& inst, const std::vector<Rat>& likelihood, int type,
    int action);
std::optional<Rat> conditional_min_margin_menu(
    const Instance& inst, const std::vector<Rat>& likelihood,
    const std::vector<int>& menu_actions);

}  // namespace bexplore
