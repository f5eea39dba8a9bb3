#include "bexplore/harness.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "bexplore/error.hpp"
#include "bexplore/info_theory.hpp"

namespace bexplore {

namespace {

std::vector<int> experiment_states(const Instance& inst,
                                   const ExperimentSpec& spec,
                                   std::uint64_t seed) {
  switch (spec.state_selection) {
    case StateSelection::All: {
      std::vector<int> all(inst.num_states());
      for (int w = 0; w < inst.num_states(); ++w) all[w] = w;
      return all;
    }
    case StateSelection::Fixed:
      return {inst.state_index(spec.fixed_state)};
    case StateSelection::Sampled: {
      Rng rng(derive_seed(seed, 0x5741));
      std::vector<Rat> weights;
      for (int w = 0; w < inst.num_states(); ++w) {
        weights.push_back(inst.state_prior(w));
      }
      return {static_cast<int>(rng.sample_categorical(weights))};
    }
  }
  return {};
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
  if (spec.horizon < 1) throw ValidationError("T", "must be >= 1");
  if (spec.seeds.empty()) throw ValidationError("seeds", "must be non-empty");
  if (spec.policy == PolicyKind::Private && spec.delta <= 0) {
    throw ValidationError("delta", "private policy requires delta > 0");
  }
  Instance inst = load_instance_file(spec.instance_path);

  PublicAnalysis pub;
  PrivateAnalysis priv;
  if (spec.policy == PolicyKind::Private) {
    priv = analyze_private(inst, spec.delta);
  } else {
    pub = analyze_public(inst);
  }

  ExperimentSummary summary;
  summary.opt_pub = benchmark_opt(inst, Mode::Public);
  summary.opt_pri = benchmark_opt(inst, Mode::Private, 0);

  if (!spec.out_dir.empty()) {
    std::filesystem::create_directories(spec.out_dir);
  }

  struct Job {
    std::uint64_t seed;
    int state;
    std::uint64_t run_index;
  };
  std::vector<Job> jobs;
  for (std::uint64_t seed : spec.seeds) {
    for (int state : experiment_states(inst, spec, seed)) {
      jobs.push_back({seed, state, static_cast<std::uint64_t>(jobs.size())});
    }
  }

  auto execute = [&](const Job& job) {
    RunSeeds seeds = derive_run_seeds(job.seed, job.run_index);
    Trace trace;
    switch (spec.policy) {
      case PolicyKind::Public:
        trace = run_public_policy(inst, pub, job.state, spec.horizon, seeds);
        break;
      case PolicyKind::Reported:
        trace = run_reported_policy(inst, pub, job.state, spec.horizon, seeds);
        break;
      case PolicyKind::Private:
        trace = run_private_policy(inst, priv, job.state, spec.horizon, seeds);
        break;
    }
    trace.instance_path = spec.instance_path;
    AuditReport audit = audit_bic(trace, inst);
    RewardSummary reward = total_reward(trace);

    RunResult result;
    result.state = job.state;
    result.seed = job.seed;
    result.total_reward = reward.total;
    result.mean_reward = reward.mean;
    result.exploration_rounds = trace.exploration_rounds;
    result.phases_completed = trace.phases_completed;
    result.exploration_complete = trace.exploration_complete;
    result.audit_ok = audit.ok;
    result.min_margin = audit.min_margin;
    if (!spec.out_dir.empty()) {
      std::ostringstream name;
      name << "trace_" << inst.states()[job.state] << "_seed" << job.seed
           << ".csv";
      const std::string path =
          (std::filesystem::path(spec.out_dir) / name.str()).string();
      std::ofstream out(path);
      if (!out) throw ValidationError(path, "cannot write trace");
      write_trace_csv(trace, inst, out);
      result.trace_path = path;
    }
    return result;
  };

  // runs are independent; worker threads fill disjoint slots and the
  // aggregation below is an ordered fold over run indices
  std::vector<RunResult> results(jobs.size());
  const int workers = std::max(1, spec.workers);
  if (workers == 1) {
    for (const Job& job : jobs) results[job.run_index] = execute(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::mutex error_mutex;
    std::string error;
    for (int wk = 0; wk < workers; ++wk) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          try {
            results[i] = execute(jobs[i]);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (error.empty()) error = e.what();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (!error.empty()) throw ValidationError("run", error);
  }

  bool first = true;
  Rat mean_sum = 0;
  for (RunResult& result : results) {
    summary.all_audits_ok = summary.all_audits_ok && result.audit_ok;
    mean_sum += result.mean_reward;
    if (first || result.mean_reward < summary.min_reward) {
      summary.min_reward = result.mean_reward;
    }
    if (first || result.mean_reward > summary.max_reward) {
      summary.max_reward = result.mean_reward;
    }
    first = false;
    summary.runs.push_back(std::move(result));
  }
  if (!summary.runs.empty()) {
    summary.mean_reward = mean_sum / Rat(static_cast<long>(summary.runs.size()));
  }
  return summary;
}

std::string render_summary(const ExperimentSummary& summary,
                           const ExperimentSpec& spec, const Instance& inst) {
  std::ostringstream out;
  if (spec.format.starts_with("json")) {
    out << "{\n  \"opt_pub\": \"" << rat_to_string(summary.opt_pub)
        << "\",\n  \"opt_pri\": \"" << rat_to_string(summary.opt_pri)
        << "\",\n  \"mean_reward\": \"" << rat_to_string(summary.mean_reward)
        << "\",\n  \"mean_reward_decimal\": " << rat_to_double(summary.mean_reward)
        << ",\n  \"all_audits_ok\": " << (summary.all_audits_ok ? "true" : "false")
        << ",\n  \"runs\": [\n";
    for (std::size_t i = 0; i < summary.runs.size(); ++i) {
      const RunResult& r = summary.runs[i];
      out << "    {\"state\": \"" << inst.states()[r.state] << "\", \"seed\": "
          << r.seed << ", \"total_reward\": \"" << rat_to_string(r.total_reward)
          << "\", \"mean_reward\": \"" << rat_to_string(r.mean_reward)
          << "\", \"exploration_rounds\": " << r.exploration_rounds
          << ", \"phases\": " << r.phases_completed << ", \"audit_ok\": "
          << (r.audit_ok ? "true" : "false") << "}"
          << (i + 1 < summary.runs.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
    return out.str();
  }
  out << "state,seed,total_reward,mean_reward,mean_reward_decimal,"
         "exploration_rounds,phases,audit_ok,min_margin\n";
  for (const RunResult& r : summary.runs) {
    out << inst.states()[r.state] << "," << r.seed << ","
        << rat_to_string(r.total_reward) << "," << rat_to_string(r.mean_reward)
        << "," << rat_to_double(r.mean_reward) << "," << r.exploration_rounds
        << "," << r.phases_completed << "," << (r.audit_ok ? 1 : 0) << ","
        << rat_to_string(r.min_margin) << "\n";
  }
  out << "# opt_pub=" << rat_to_string(summary.opt_pub)
      << " opt_pri=" << rat_to_string(summary.opt_pri)
      << " mean=" << rat_to_string(summary.mean_reward) << " ("
      << rat_to_double(summary.mean_reward) << ")"
      << " min=" << rat_to_string(summary.min_reward)
      << " max=" << rat_to_string(summary.max_reward)
      << " audits=" << (summary.all_audits_ok ? "ok" : "FAILED") << "\n";
  return out.str();
}

}  // namespace bexplore
