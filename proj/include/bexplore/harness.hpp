#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bexplore/policies.hpp"

namespace bexplore {

enum class StateSelection { All, Fixed, Sampled };

struct ExperimentSpec {
  std::string instance_path;
  PolicyKind policy = PolicyKind::Public;
  Rat delta = 0;  // private only
  long horizon = 0;
  std::vector<std::uint64_t> seeds;
  StateSelection state_selection = StateSelection::All;
  std::string fixed_state;  // label, when Fixed
  std::string out_dir;      // trace files are written here when non-empty
  std::string format = "csv";  // "csv" | "json"
  int workers = 1;  // runs are independent; results fold in run order
};

struct RunResult {
  int state = 0;
  std::uint64_t seed = 0;
  Rat total_reward;
  Rat mean_reward;
  long exploration_rounds = -1;
  int phases_completed = 0;
  bool exploration_complete = false;
  bool audit_ok = false;
  Rat min_margin;
  std::string trace_path;
};

struct ExperimentSummary {
  std::vector<RunResult> runs;
  Rat opt_pub, opt_pri;
  Rat mean_reward;  // exact average of per-run means
  Rat min_reward, max_reward;
  bool all_audits_ok = true;
};

// One policy run per (state, seed); exact aggregation in run order.
// Deterministic given the spec.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

std::string render_summary(const ExperimentSummary& summary,
                           const ExperimentSpec& spec, const Instance& inst);

// Command-line surface: explore, opt, simulate, audit, info-diag, statics.
// Exit codes: 0 success, 1 check failure, 2 usage or IO error.
int run_cli(const std::vector<std::string>& args);

}  // namespace bexplore
