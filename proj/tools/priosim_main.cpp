#include <cstdint>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "priosim/config.hpp"
#include "priosim/control.hpp"
#include "priosim/errors.hpp"
#include "priosim/netsim.hpp"
#include "priosim/plot.hpp"
#include "priosim/sim.hpp"
#include "priosim/stability.hpp"
#include "priosim/trace.hpp"

namespace {

using namespace priosim;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitContract = 2;
constexpr int kExitVerify = 3;

ScenarioConfig load_or_default(const std::string& path) {
  return path.empty() ? reference_scenario() : load_config(path);
}

void print_summary(const SimSummary& s) {
  std::cout << "rounds: " << s.rounds << "\n"
            << "agents: " << s.n_agents << "  m_ctrl: " << s.m_ctrl << "\n"
            << "mean cost: " << s.mean_cost << "  (first half " << s.mean_cost_first_half
            << ", second half " << s.mean_cost_second_half << ")\n"
            << "transmissions: " << s.total_transmissions << "  grants: " << s.total_grants
            << "  skip marks: " << s.total_skip_marks << "\n"
            << "mean realized control slots per round: " << s.mean_realized_slots << "\n";
  std::cout << "per-agent transmissions:";
  for (int64_t t : s.transmissions) std::cout << ' ' << t;
  std::cout << "\nper-agent grants:";
  for (int64_t g : s.grants) std::cout << ' ' << g;
  std::cout << "\n";
}

std::vector<uint64_t> parse_seeds(const std::string& csv) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(csv);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (field.empty()) continue;
    seeds.push_back(std::stoull(field));
  }
  if (seeds.empty()) throw ConfigError("no seeds given");
  return seeds;
}

int cmd_synthesize(const std::string& config_path, const std::string& out_path) {
  const ScenarioConfig cfg = load_or_default(config_path);
  const std::vector<LtiModel> models = build_models(cfg);
  const GainSet gains = synthesize_gains(models, build_cost(cfg));
  save_gains(gains, out_path);
  std::cout << "gains written to " << out_path << " (closed-loop spectral radius "
            << closed_loop_spectral_radius(models, gains) << ")\n";
  return kExitOk;
}

int cmd_bandwidth(NetworkConfig net, bool predictive) {
  int agg_bytes = 0;
  const int m_ctrl = control_bandwidth(net, predictive, &agg_bytes);
  std::cout << "mode: " << (predictive ? "predictive" : "periodic") << "\n"
            << "m_ctrl: " << m_ctrl << "\n";
  if (predictive)
    std::cout << "aggregate bytes: " << agg_bytes << "\n"
              << "slot time: " << net.slot_us + 4.0 * agg_bytes << " us\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& mode, int64_t rounds,
            uint64_t seed, bool seed_set, const std::string& trace_path,
            const std::string& summary_path) {
  ScenarioConfig cfg = load_or_default(config_path);
  if (!mode.empty()) cfg.mode = mode_from_string(mode);
  if (rounds > 0) cfg.rounds = rounds;
  if (seed_set) cfg.seed = seed;
  if (!trace_path.empty()) cfg.trace_path = trace_path;

  const SimResult result = run_scenario(cfg);
  if (!cfg.trace_path.empty()) {
    write_trace_csv(result, cfg.trace_path);
    std::cout << "trace written to " << cfg.trace_path << "\n";
  }
  if (!summary_path.empty()) {
    write_summary_json(result.summary, summary_path);
    std::cout << "summary written to " << summary_path << "\n";
  }
  print_summary(result.summary);
  return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::string& seeds_csv) {
  const ScenarioConfig cfg = load_or_default(config_path);
  const SweepComparison sweep = compare_modes_sweep(cfg, parse_seeds(seeds_csv));
  std::cout << "cost ratio (predictive / periodic), per seed:\n";
  for (size_t i = 0; i < sweep.seeds.size(); ++i)
    std::cout << "  seed " << sweep.seeds[i] << ": first half "
              << sweep.per_seed[i].cost_ratio_first_half << ", second half "
              << sweep.per_seed[i].cost_ratio_second_half << "\n";
  std::cout << "mean first half: " << sweep.mean_ratio_first_half << " (stddev "
            << sweep.stddev_ratio_first_half << ")\n"
            << "mean second half: " << sweep.mean_ratio_second_half << " (stddev "
            << sweep.stddev_ratio_second_half << ")\n";
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& seeds_csv) {
  ScenarioConfig cfg = load_or_default(config_path);
  // The boundedness verdict compares second-half to first-half window sups,
  // so the deliberate step disturbance is removed for this check.
  cfg.disturbances.clear();
  const std::vector<uint64_t> seeds = parse_seeds(seeds_csv);

  bool ok = true;
  for (uint64_t seed : seeds) {
    ScenarioConfig run_cfg = cfg;
    run_cfg.seed = seed;
    const SimResult result = run_scenario(run_cfg);
    const MsbVerdict v =
        msb_monitor(state_norm_series(result), cfg.cost_window, cfg.msb_growth_factor);
    const CaseReport cases = stability_case_report(result);
    std::cout << "seed " << seed << ": windowed second moment sup " << v.sup_first << " -> "
              << v.sup_second << " (growth " << v.growth << ") "
              << (v.stable ? "bounded" : "NOT bounded") << "\n"
              << "  service windows: below-threshold " << cases.counts[0] << ", transmitted "
              << cases.counts[1] << ", dipped " << cases.counts[2] << ", never-served "
              << cases.counts[3] << "\n"
              << "  post-transmission drift ratio " << cases.c2_mean_ratio << " +- "
              << cases.c2_stderr << " " << (cases.c2_pass ? "(within bound)" : "(EXCEEDS bound)")
              << "\n";
    ok = ok && v.stable && cases.c2_pass;
  }

  // One-step drift bound spot check on every distinct agent class.
  const std::vector<LtiModel> models = build_models(cfg);
  const GainSet gains = synthesize_gains(models, build_cost(cfg));
  for (int i : {0, 2, 7}) {
    if (i >= static_cast<int>(models.size())) continue;
    Eigen::VectorXd e0 = Eigen::VectorXd::Constant(models[i].state_dim(), 0.01);
    const DriftCheck d = drift_bound_mc(models[i], gains.block(i, i), e0, 100000, cfg.seed + i);
    std::cout << "drift bound, agent " << i << ": lhs " << d.lhs_mean << " +- " << d.lhs_stderr
              << " vs rhs " << d.rhs << " " << (d.pass ? "(holds)" : "(VIOLATED)") << "\n";
    ok = ok && d.pass;
  }

  std::cout << (ok ? "verification passed\n" : "verification FAILED\n");
  return ok ? kExitOk : kExitVerify;
}

int cmd_plot(const std::string& trace_path, const std::string& prefix, int window) {
  const TraceData trace = read_trace_csv(trace_path);
  plot_cost(trace, window, prefix + "cost.svg");
  plot_allocation(trace, prefix + "allocation.svg");
  plot_priority_histogram(trace, prefix + "priority_histogram.svg");
  std::cout << "figures written to " << prefix << "{cost,allocation,priority_histogram}.svg\n";
  return kExitOk;
}

int cmd_recompute(const std::string& config_path, const std::string& trace_path,
                  const std::string& summary_path) {
  const ScenarioConfig cfg = load_or_default(config_path);
  const TraceData trace = read_trace_csv(trace_path);
  const SimSummary stored = read_summary_json(summary_path);
  const std::vector<std::string> issues = recompute_check(cfg, trace, stored);
  if (issues.empty()) {
    std::cout << "all summary metrics recompute from the trace\n";
    return kExitOk;
  }
  for (const std::string& issue : issues) std::cout << issue << "\n";
  return kExitVerify;
}

int cmd_write_config(const std::string& out_path) {
  save_config(reference_scenario(), out_path);
  std::cout << "reference scenario written to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-simulator of distributed control over a shared lossy wireless bus"};
  app.require_subcommand(1);

  std::string config_path, out_path = "gains.txt", mode, trace_path, summary_path;
  std::string seeds_csv = "1,2,3", prefix;
  int64_t rounds = 0;
  uint64_t seed = 0;
  int window = 50;
  bool predictive = false;

  CLI::App* synth = app.add_subcommand("synthesize", "Synthesize the distributed gain set");
  synth->add_option("--config", config_path, "Scenario config (default: built-in reference)");
  synth->add_option("--out", out_path, "Output gains file")->required();

  NetworkConfig net;
  net.n_agents = 20;
  net.m_app = 18;
  CLI::App* bw = app.add_subcommand("bandwidth", "Control bandwidth for a round budget");
  bw->add_option("--agents", net.n_agents, "Number of agents");
  bw->add_option("--app", net.m_app, "Application messages per round");
  bw->add_option("--bits", net.priority_bits, "Priority bits");
  bw->add_option("--slot-us", net.slot_us, "Base slot length in us");
  bw->add_option("--slots-per-message", net.slots_per_message, "Slots per message");
  bw->add_option("--budget-us", net.round_budget_us, "Round budget in us");
  bw->add_flag("--predictive", predictive, "Account for the in-packet priority aggregate");

  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", config_path, "Scenario config (default: built-in reference)");
  run->add_option("--mode", mode, "Override mode: predictive | periodic");
  run->add_option("--rounds", rounds, "Override run length");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Override RNG seed");
  run->add_option("--trace", trace_path, "Write the round trace CSV here");
  run->add_option("--summary", summary_path, "Write the summary JSON here");

  CLI::App* cmp = app.add_subcommand("compare", "Compare predictive vs periodic scheduling");
  cmp->add_option("--config", config_path, "Scenario config (default: built-in reference)");
  cmp->add_option("--seeds", seeds_csv, "Comma-separated seeds (>= 3)");

  CLI::App* verify = app.add_subcommand("verify", "Empirical stability checks");
  verify->add_option("--config", config_path, "Scenario config (default: built-in reference)");
  verify->add_option("--seeds", seeds_csv, "Comma-separated seeds");

  CLI::App* plot = app.add_subcommand("plot", "Emit SVG figures from a trace");
  plot->add_option("--trace", trace_path, "Trace CSV")->required();
  plot->add_option("--out-prefix", prefix, "Output path prefix");
  plot->add_option("--window", window, "Cost moving-average window");

  CLI::App* rec = app.add_subcommand("recompute", "Audit a summary against its trace");
  rec->add_option("--config", config_path, "Scenario config (default: built-in reference)");
  rec->add_option("--trace", trace_path, "Trace CSV")->required();
  rec->add_option("--summary", summary_path, "Summary JSON")->required();

  CLI::App* wc = app.add_subcommand("write-config", "Write the reference scenario config");
  wc->add_option("--out", out_path, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (synth->parsed()) return cmd_synthesize(config_path, out_path);
    if (bw->parsed()) return cmd_bandwidth(net, predictive);
    if (run->parsed())
      return cmd_run(config_path, mode, rounds, seed, seed_opt->count() > 0, trace_path,
                     summary_path);
    if (cmp->parsed()) return cmd_compare(config_path, seeds_csv);
    if (verify->parsed()) return cmd_verify(config_path, seeds_csv);
    if (plot->parsed()) return cmd_plot(trace_path, prefix, window);
    if (rec->parsed()) return cmd_recompute(config_path, trace_path, summary_path);
    if (wc->parsed()) return cmd_write_config(out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitContract;
  }
  return kExitConfig;
}
