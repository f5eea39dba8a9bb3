#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bexplore/error.hpp"
#include "bexplore/harness.hpp"
#include "bexplore/info_theory.hpp"

namespace bexplore {

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots != std::string::npos) {
      const std::uint64_t lo = std::stoull(part.substr(0, dots));
      const std::uint64_t hi = std::stoull(part.substr(dots + 2));
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else if (!part.empty()) {
      seeds.push_back(std::stoull(part));
    }
  }
  if (seeds.empty()) throw ValidationError("seeds", "empty seed list");
  return seeds;
}

std::map<std::string, Rat> parse_dist(const std::string& text) {
  std::map<std::string, Rat> dist;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("dist", "expected label=p/q, got \"" + part + "\"");
    }
    dist[part.substr(0, eq)] = parse_rational(part.substr(eq + 1));
  }
  if (dist.empty()) throw ValidationError("dist", "empty distribution");
  return dist;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ValidationError(out_path, "cannot open for writing");
  out << text;
}

std::string pair_set_line(const LabelPairSet& pairs) {
  std::string line;
  for (const auto& [t, a] : pairs) line += " (" + t + "," + a + ")";
  return line.empty() ? " -" : line;
}

int cmd_explore(const std::string& instance_path, const std::string& mode,
                const Rat& delta, const std::string& out_path) {
  Instance inst = load_instance_file(instance_path);
  std::ostringstream out;
  if (mode == "public") {
    PublicAnalysis a = analyze_public(inst);
    out << "mode=public phases=" << a.exploration_phases
        << " stabilized_at=" << a.stabilized_at << "\n";
    for (int w = 0; w < inst.num_states(); ++w) {
      out << "state " << inst.states()[w] << " explorable:";
      for (const auto& [t, ac] : a.stable[w]) {
        out << " (" << inst.types()[t] << "," << inst.actions()[ac] << ")";
      }
      out << "\n";
    }
    for (int l = 1; l <= a.stabilized_at; ++l) {
      const PublicPhase& ph = a.phases[l - 1];
      out << "phase " << l << " signals:";
      for (const auto& s : ph.structure.support) out << " " << s;
      out << "\n";
      for (int t = 0; t < inst.num_types(); ++t) {
        for (int sig = 0; sig < ph.structure.num_signals(); ++sig) {
          out << "  pimax[" << inst.types()[t] << " | "
              << ph.structure.support[sig] << "]:";
          for (int ac = 0; ac < inst.num_actions(); ++ac) {
            const Rat& p = ph.per_type[t].pimax.table[sig][ac];
            if (p != 0) {
              out << " " << inst.actions()[ac] << ":" << rat_to_string(p);
            }
          }
          out << "\n";
        }
      }
    }
  } else if (mode == "private") {
    PrivateAnalysis a = analyze_private(inst, delta);
    out << "mode=private delta=" << rat_to_string(delta)
        << " menus=" << a.menus.size() << " stabilized_at=" << a.stabilized_at
        << "\n";
    for (int w = 0; w < inst.num_states(); ++w) {
      out << "state " << inst.states()[w] << " explorable menus:";
      for (int m : a.stable[w]) {
        out << " [" << menu_to_string(inst, a.menus[m]) << "]";
      }
      out << "\n";
    }
    for (int l = 1; l <= a.stabilized_at; ++l) {
      const PrivatePhase& ph = a.phases[l - 1];
      out << "phase " << l << " signals:";
      for (const auto& s : ph.structure.support) out << " " << s;
      out << "\n";
      for (int sig = 0; sig < ph.structure.num_signals(); ++sig) {
        out << "  pimax[" << ph.structure.support[sig] << "]:";
        for (std::size_t m = 0; m < a.menus.size(); ++m) {
          const Rat& p = ph.menus.pimax.table[sig][m];
          if (p != 0) {
            out << " [" << menu_to_string(inst, a.menus[m])
                << "]:" << rat_to_string(p);
          }
        }
        out << "\n";
      }
    }
  } else {
    throw ValidationError("mode", "expected public or private");
  }
  emit(out.str(), out_path);
  return 0;
}

int cmd_opt(const std::string& instance_path, const std::string& out_path) {
  Instance inst = load_instance_file(instance_path);
  const Rat opt_pub = benchmark_opt(inst, Mode::Public);
  const Rat opt_pri = benchmark_opt(inst, Mode::Private, 0);
  std::ostringstream out;
  out << "OPT_pub = " << rat_to_string(opt_pub) << " ("
      << rat_to_double(opt_pub) << ")\n";
  out << "OPT_pri = " << rat_to_string(opt_pri) << " ("
      << rat_to_double(opt_pri) << ")\n";
  emit(out.str(), out_path);
  return opt_pub >= opt_pri ? 0 : 1;
}

int cmd_simulate(const ExperimentSpec& spec) {
  Instance inst = load_instance_file(spec.instance_path);
  ExperimentSummary summary = run_experiment(spec);
  std::cout << render_summary(summary, spec, inst);
  return summary.all_audits_ok ? 0 : 1;
}

int cmd_audit(const std::string& trace_path, const std::string& instance_path) {
  Instance inst = load_instance_file(instance_path);
  std::ifstream in(trace_path);
  if (!in) throw ValidationError(trace_path, "cannot open trace");
  Trace trace = read_trace_csv(in, inst);
  AuditReport report = audit_bic(trace, inst);
  std::cout << "rounds=" << report.rounds_checked
            << " threshold=" << rat_to_string(report.threshold)
            << " min_margin=" << rat_to_string(report.min_margin) << "\n";
  for (const auto& v : report.violations) {
    std::cout << "violation at round " << v.round << ": " << v.note
              << " (margin " << rat_to_string(v.margin) << ")\n";
  }
  std::cout << (report.ok ? "audit OK" : "audit FAILED") << "\n";
  return report.ok ? 0 : 1;
}

int cmd_info_diag(const std::string& instance_path, const Rat& delta,
                  int rounds, std::uint64_t seed) {
  Instance inst = load_instance_file(instance_path);
  bool ok = true;
  std::ostringstream out;

  // lemma-level identities for the engine's own phase signals
  for (int l = 2; l <= rounds; ++l) {
    FiniteJoint joint =
        policy_history_joint(inst, {Mode::Public, 0, l, 200000});
    std::vector<int> hist;
    for (int t = 1; t <= l - 1; ++t) hist.push_back(joint.var_index("H" + std::to_string(t)));
    CmiResult cmi = conditional_mutual_information(
        joint, hist, {joint.var_index("omega")}, {joint.var_index("S")});
    out << "public l=" << l << ": I(S';omega|S_l)=" << cmi.value
        << " exact_zero=" << (cmi.exact_zero ? "true" : "false") << "\n";
    ok = ok && cmi.exact_zero;
  }
  if (delta > 0) {
    FiniteJoint joint =
        policy_history_joint(inst, {Mode::Private, delta, 2, 200000});
    CmiResult cmi = conditional_mutual_information(
        joint, {joint.var_index("H1")}, {joint.var_index("omega")},
        {joint.var_index("S")});
    const Rat budget = delta * delta / 8;
    const bool bound_ok = cmi.exact_zero || cmi.value <= rat_to_double(budget);
    out << "private l=2 delta=" << rat_to_string(delta)
        << ": I=" << cmi.value << " budget=" << rat_to_double(budget)
        << " ok=" << (bound_ok ? "true" : "false")
        << " (idealized signal structure; estimation error folded into delta)\n";
    ok = ok && bound_ok;
  }

  // random-distribution sweep of the basic inequalities
  Rng rng(seed);
  int violations = 0;
  const int sweeps = 200;
  for (int i = 0; i < sweeps; ++i) {
    const int n = 2 + static_cast<int>(rng.uniform_index(4));
    std::vector<Rat> p(n), q(n);
    Rat ps = 0, qs = 0;
    for (int k = 0; k < n; ++k) {
      p[k] = Rat(1 + static_cast<long>(rng.uniform_index(20)));
      q[k] = Rat(1 + static_cast<long>(rng.uniform_index(20)));
      ps += p[k];
      qs += q[k];
    }
    for (int k = 0; k < n; ++k) {
      p[k] /= ps;
      q[k] /= qs;
    }
    if (!pinsker_check(p, q).holds) violations += 1;
    if (kl_divergence(p, q) < 0) violations += 1;
  }
  out << "pinsker/kl sweep: " << sweeps << " pairs, " << violations
      << " violations\n";
  ok = ok && violations == 0;

  out << (ok ? "info-diag OK" : "info-diag FAILED") << "\n";
  std::cout << out.str();
  return ok ? 0 : 1;
}

int cmd_statics(const std::string& instance_path, const std::string& dist) {
  Instance inst = load_instance_file(instance_path);
  StaticsReport report = comparative_statics(inst, parse_dist(dist));
  std::cout << (report.same_support ? "equal support: expect identical public sets"
                                    : "restricted support: expect containment")
            << "\n";
  for (int w = 0; w < inst.num_states(); ++w) {
    std::cout << "state " << inst.states()[w] << "\n";
    std::cout << "  public full:" << pair_set_line(report.public_full[w]) << "\n";
    std::cout << "  public alt: " << pair_set_line(report.public_alt[w]) << "\n";
    std::cout << "  private full:" << pair_set_line(report.private_full[w])
              << "\n";
    std::cout << "  private alt: " << pair_set_line(report.private_alt[w])
              << "\n";
  }
  for (const auto& note : report.notes) std::cout << "note: " << note << "\n";
  std::cout << (report.public_claim_ok ? "public claim OK" : "public claim FAILED")
            << "\n";
  return report.public_claim_ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Bayesian exploration engine"};
  app.require_subcommand(1);

  std::string instance_path, mode = "public", out_path, trace_path, dist;
  std::string policy = "public", state = "all", format = "csv", seeds = "1";
  std::string delta_text = "0";
  long horizon = 1000;
  int rounds = 2;
  int workers = 1;
  std::uint64_t diag_seed = 7;

  auto* explore = app.add_subcommand("explore", "eventually-explorable sets");
  explore->add_option("--instance", instance_path)->required();
  explore->add_option("--mode,--policy", mode);
  explore->add_option("--delta", delta_text);
  explore->add_option("--out", out_path);

  auto* opt = app.add_subcommand("opt", "OPT benchmarks");
  opt->add_option("--instance", instance_path)->required();
  opt->add_option("--out", out_path);

  auto* simulate = app.add_subcommand("simulate", "seeded policy runs");
  simulate->add_option("--instance", instance_path)->required();
  simulate->add_option("--policy", policy);
  simulate->add_option("--delta", delta_text);
  simulate->add_option("-T,--rounds", horizon);
  simulate->add_option("--seeds", seeds);
  simulate->add_option("--state", state);
  simulate->add_option("--out", out_path);
  simulate->add_option("--format", format);
  simulate->add_option("--workers", workers);

  auto* audit = app.add_subcommand("audit", "re-audit a trace file");
  audit->add_option("--trace", trace_path)->required();
  audit->add_option("--instance", instance_path)->required();

  auto* diag = app.add_subcommand("info-diag", "information-theoretic checks");
  diag->add_option("--instance", instance_path)->required();
  diag->add_option("--delta", delta_text);
  diag->add_option("--rounds", rounds);
  diag->add_option("--seed", diag_seed);

  auto* statics = app.add_subcommand("statics", "comparative statics");
  statics->add_option("--instance", instance_path)->required();
  statics->add_option("--dist", dist)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const Rat delta = parse_rational(delta_text);
    if (explore->parsed()) return cmd_explore(instance_path, mode, delta, out_path);
    if (opt->parsed()) return cmd_opt(instance_path, out_path);
    if (simulate->parsed()) {
      ExperimentSpec spec;
      spec.instance_path = instance_path;
      if (policy == "public") {
        spec.policy = PolicyKind::Public;
      } else if (policy == "reported") {
        spec.policy = PolicyKind::Reported;
      } else if (policy == "private") {
        spec.policy = PolicyKind::Private;
      } else {
        throw ValidationError("policy", "expected public, reported or private");
      }
      spec.delta = delta;
      spec.horizon = horizon;
      spec.seeds = parse_seeds(seeds);
      if (state == "all") {
        spec.state_selection = StateSelection::All;
      } else if (state == "sampled") {
        spec.state_selection = StateSelection::Sampled;
      } else {
        spec.state_selection = StateSelection::Fixed;
        spec.fixed_state = state;
      }
      spec.out_dir = out_path;
      spec.format = format;
      spec.workers = workers;
      return cmd_simulate(spec);
    }
    if (audit->parsed()) return cmd_audit(trace_path, instance_path);
    if (diag->parsed()) {
      return cmd_info_diag(instance_path, delta, rounds, diag_seed);
    }
    if (statics->parsed()) return cmd_statics(instance_path, dist);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace bexplore
