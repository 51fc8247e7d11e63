// Command-line front end: run experiments, print presets, inspect instances
// and re-aggregate runs.csv files.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "mfb/config.hpp"
#include "mfb/csv.hpp"
#include "mfb/diagnostics.hpp"
#include "mfb/experiment.hpp"
#include "mfb/rdfe.hpp"

namespace {

using namespace mfb;

void print_final_table(const SummaryStats& stats, double budget) {
  std::printf("\nFinal-budget regret (budget %s)\n", format_number(budget).c_str());
  std::printf("%-12s %14s %12s %6s\n", "method", "mean", "se", "n");
  for (const auto& m : stats.methods) {
    if (m.budget != budget) continue;
    std::printf("%-12s %14.1f %12.1f %6zu\n", m.method.c_str(), m.mean, m.se, m.n);
  }
  bool header = false;
  for (const auto& p : stats.paired) {
    if (p.budget != budget) continue;
    if (!header) {
      std::printf("\n%-24s %12s %26s\n", "paired difference", "mean", "95% CI");
      header = true;
    }
    const std::string label = p.method_a + " - " + p.method_b;
    std::printf("%-24s %12.1f   [%10.1f, %10.1f]\n", label.c_str(), p.mean_diff, p.ci_lo, p.ci_hi);
  }
}

int cmd_run(const std::string& path, const std::string& seeds, const std::vector<std::string>& methods,
            const std::string& out, unsigned jobs) {
  ExperimentConfig config = load_config(path);
  if (!seeds.empty()) apply_seed_range(config, seeds);
  if (!methods.empty()) {
    config.methods.clear();
    for (const auto& m : methods) config.methods.push_back(canonical_method(m));
  }
  if (!out.empty()) config.out_dir = out;
  if (jobs) config.jobs = jobs;
  if (const char* env = std::getenv("MFB_JOBS")) {
    const int n = std::atoi(env);
    if (n < 1) throw ConfigError("MFB_JOBS must be a positive integer");
    config.jobs = static_cast<unsigned>(n);
  }
  config.validate();

  const auto records = run_experiment(config);
  const auto rows = flatten(records);
  const auto stats = summarize(rows);
  write_outputs(config.out_dir, rows, stats);
  std::printf("%zu runs (%zu rows) written to %s\n", records.size(), rows.size(), config.out_dir.c_str());
  print_final_table(stats, config.budget);
  return 0;
}

int cmd_preset(const std::string& name, bool print) {
  if (!print) {
    for (const auto& n : preset_names()) std::printf("%s\n", n.c_str());
    return 0;
  }
  const ExperimentConfig c = preset_config(name);
  std::printf("preset = %s\n%s", name.c_str(), to_config_text(c).c_str());
  return 0;
}

std::string fmt_cost(double c) { return std::isinf(c) ? "inf" : format_number(c); }

int cmd_diagnose(const std::string& path) {
  ExperimentConfig config = load_config(path);
  config.keep_logs = true;
  const ConfidenceConfig cfg = config.confidence();
  const BanditInstance instance = build_instance(config, config.seed_first);
  const CostModel costs = instance.costs();

  ArmPartition part = partition_arms(instance, cfg, config.tacc.gamma, config.tacc.s0);
  const RunRecord tacc = run_method(config, instance, "TACC", config.seed_first);
  part = classify_detected(std::move(part), tacc.log, cfg.budget_queries());

  std::printf("seed %llu  K %zu  T %llu  l %.6g  N_gamma %llu  S0 %llu  best arm %zu\n",
              static_cast<unsigned long long>(config.seed_first), instance.num_arms(),
              static_cast<unsigned long long>(cfg.budget_queries()), cfg.log_factor(),
              static_cast<unsigned long long>(part.n_gamma), static_cast<unsigned long long>(part.s0),
              instance.best_arm());
  std::printf("classes: A %zu  B %zu  C %zu (detected on the seed's TACC run: %zu)\n", part.count(ArmClass::A),
              part.count(ArmClass::B), part.count(ArmClass::C),
              static_cast<std::size_t>(std::count(part.detected.begin(), part.detected.end(), true)));
  std::printf("theorem bound %.6g   TACC regret on this seed %.6g (coverage %s)\n\n",
              theorem_bound(instance, cfg, part), tacc.final_regret, tacc.coverage_held ? "held" : "violated");

  std::printf("%5s %10s %10s %7s %10s %14s\n", "arm", "mu_high", "gap", "class", "tau", "static margin");
  for (Index a = 0; a < instance.num_arms(); ++a) {
    if (a == instance.best_arm()) continue;
    const double gap = instance.gap(a);
    const std::string tau = part.tau[a] ? std::to_string(*part.tau[a]) : "inf";
    std::string label(to_string(part.classes[a]));
    if (part.detected[a]) label += "*";
    const double margin = gap > 0.0 ? static_vs_adaptive_margin(gap, cfg, costs, config.tacc.s0) : 0.0;
    std::printf("%5zu %10.4f %10.4f %7s %10s %14.6g\n", a, instance.arm(a).mu_high, gap, label.c_str(), tau.c_str(),
                margin);
  }

  std::printf("\ncertification costs over the dyadic grid (eps = 2^-r)\n");
  std::printf("%5s %4s %12s %12s %12s\n", "arm", "r", "c_low", "c_high", "c_star");
  for (Index a = 0; a < instance.num_arms(); ++a) {
    const auto& env = instance.arm(a).envelope;
    for (int r = 1; r <= 8; ++r) {
      const double eps = std::ldexp(1.0, -r);
      const double lo = rdfe_cert_cost(cfg, env, costs, eps, Fidelity::Low);
      const double hi = rdfe_cert_cost(cfg, env, costs, eps, Fidelity::High);
      std::printf("%5zu %4d %12s %12s %12s\n", a, r, fmt_cost(lo).c_str(), fmt_cost(hi).c_str(),
                  fmt_cost(std::fmin(lo, hi)).c_str());
    }
  }
  return 0;
}

int cmd_summarize(const std::string& in_path, const std::string& out_dir) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + in_path);
  const auto rows = read_runs_csv(in);
  const auto stats = summarize(rows);
  if (!out_dir.empty()) {
    write_outputs(out_dir, rows, stats);
  } else {
    write_summary_csv(std::cout, stats);
    std::cout << '\n';
    write_paired_csv(std::cout, stats);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-fidelity bandit experiments"};
  app.require_subcommand(1);

  std::string config_path, seeds, out, preset, in_path, summary_out;
  std::vector<std::string> methods;
  unsigned jobs = 0;
  bool print = false;

  auto* run = app.add_subcommand("run", "Run every (seed, method) pair and write CSVs");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--seeds", seeds, "Inclusive seed range a..b");
  run->add_option("--methods", methods, "Methods to run")->delimiter(',');
  run->add_option("--out", out, "Output directory");
  run->add_option("--jobs", jobs, "Worker threads (MFB_JOBS overrides)");

  auto* pre = app.add_subcommand("preset", "List presets, or print one as a config file");
  pre->add_option("name", preset, "Preset name");
  pre->add_flag("--print", print, "Print the preset's canonical config");

  auto* diag = app.add_subcommand("diagnose", "Arm classes, bounds and certification costs for the first seed");
  diag->add_option("--config", config_path, "Config file")->required();

  auto* summ = app.add_subcommand("summarize", "Recompute summary and paired statistics from runs.csv");
  summ->add_option("--in", in_path, "runs.csv")->required();
  summ->add_option("--out", summary_out, "Write summary.csv/paired.csv (and a copy of runs.csv) here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seeds, methods, out, jobs);
    if (*pre) {
      if (print && preset.empty()) throw ConfigError("preset --print needs a preset name");
      return cmd_preset(preset, print);
    }
    if (*diag) return cmd_diagnose(config_path);
    if (*summ) return cmd_summarize(in_path, summary_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
