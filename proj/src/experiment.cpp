#include "mfb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "mfb/config.hpp"

namespace mfb {

CostModel ExperimentConfig::costs() const {
  if (family == EnvFamily::Synthetic) return synthetic.costs;
  return CostModel(1.0, proxy.high_cost);
}

std::size_t ExperimentConfig::num_arms() const {
  switch (family) {
    case EnvFamily::Synthetic:
      return synthetic.means == SyntheticSpec::Means::Fixed ? synthetic.fixed_means.size() : synthetic.num_arms;
    case EnvFamily::Residual:
    case EnvFamily::Vanishing:
      return proxy.means.empty() ? default_proxy_means().size() : proxy.means.size();
    case EnvFamily::Checkpoint5Arm:
      return checkpoint_five_arm_means().size();
  }
  return 0;
}

Count ExperimentConfig::query_horizon() const { return mfb::query_horizon(budget, costs().low()); }

ConfidenceConfig ExperimentConfig::confidence() const {
  return ConfidenceConfig(rho, delta, num_arms(), query_horizon());
}

void ExperimentConfig::validate() const {
  const CostModel c = costs();
  tacc.validate(c);
  if (!(tacc.gamma < 1.0)) throw ConfigError("algo.gamma must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("algo.delta must lie in (0, 1)");
  if (!(rho > 0.0)) throw ConfigError("algo.rho must be > 0");
  if (fixed_bias && !(*fixed_bias >= 0.0)) throw ConfigError("algo.fixed_bias must be >= 0");
  if (!(budget > 0.0)) throw ConfigError("budget.total must be > 0");
  if (checkpoints.empty()) throw ConfigError("budget.checkpoints must not be empty");
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i] > checkpoints[i - 1])) throw ConfigError("budget.checkpoints must be strictly ascending");
  }
  if (checkpoints.back() != budget) throw ConfigError("budget.checkpoints must end at budget.total");
  if (num_arms() == 0) throw ConfigError("env.arms must be >= 1");
  const double warm = static_cast<double>(num_arms()) * (c.low() + c.high());
  if (warm > budget) throw ConfigError("budget.total cannot pay for the warm start (K * (low + high))");
  if (seed_count == 0) throw ConfigError("seeds.count must be >= 1");
  if (methods.empty()) throw ConfigError("methods must list at least one method");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (!seen.insert(canonical_method(m)).second) throw ConfigError("methods lists '" + m + "' twice");
  }
  if (jobs == 0) throw ConfigError("jobs must be >= 1");
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names{"TACC", "DNC", "MF-UCB", "UCB", "STATIC-ELIM", "RDFE"};
  return names;
}

std::string canonical_method(const std::string& name) {
  std::string up;
  for (char ch : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  if (up == "MFUCB" || up == "MF_UCB") up = "MF-UCB";
  if (up == "STATIC_ELIM" || up == "LUCB") up = "STATIC-ELIM";
  for (const auto& m : known_methods()) {
    if (m == up) return m;
  }
  throw ConfigError("unknown method '" + name + "' (expected one of TACC, DNC, MF-UCB, UCB, STATIC-ELIM, RDFE)");
}

BanditInstance build_instance(const ExperimentConfig& config, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x696e7374u};
  Rng rng(seq);
  const Count horizon = config.query_horizon();
  switch (config.family) {
    case EnvFamily::Synthetic:
      return make_synthetic_instance(config.synthetic, horizon, rng);
    case EnvFamily::Residual:
      return make_proxy_judge_instance(ProxyRegime::Residual, config.proxy, horizon, rng);
    case EnvFamily::Vanishing:
      return make_proxy_judge_instance(ProxyRegime::Vanishing, config.proxy, horizon, rng);
    case EnvFamily::Checkpoint5Arm:
      return make_proxy_judge_instance(ProxyRegime::Checkpoint5Arm, config.proxy, horizon, rng);
  }
  throw ConfigError("unknown environment family");
}

std::vector<CheckpointValue> checkpoint_values(std::span<const ActionRecord> log, std::span<const double> checkpoints) {
  std::vector<CheckpointValue> out;
  out.reserve(checkpoints.size());
  CheckpointValue running;
  std::size_t i = 0;
  for (double cp : checkpoints) {
    while (i < log.size() && log[i].cost_after <= cp) {
      const ActionRecord& rec = log[i];
      running.regret = rec.regret_after;
      if (rec.fidelity == Fidelity::Low) {
        ++running.low_calls;
        if (rec.reason == ActionReason::ContinuationLow) ++running.continuation_calls;
      } else {
        ++running.high_calls;
      }
      ++i;
    }
    running.budget = cp;
    out.push_back(running);
  }
  return out;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_digest(const ExperimentConfig& config) { return fnv1a_hex(to_config_text(config, false)); }

std::string make_run_id(const std::string& digest, std::uint64_t seed, const std::string& method) {
  return fnv1a_hex(digest + "|" + std::to_string(seed) + "|" + method);
}

RunRecord run_method(const ExperimentConfig& config, const BanditInstance& instance, const std::string& method,
                     std::uint64_t seed) {
  const std::string name = canonical_method(method);
  const ConfidenceConfig cfg = config.confidence();
  TaccParams params = config.tacc;
  params.budget = config.budget;

  Episode episode(instance, cfg, config.budget, seed);
  RunRecord rec;
  rec.seed = seed;
  rec.method = name;

  auto fixed_bias = [&] {
    if (config.fixed_bias) return std::vector<double>(instance.num_arms(), *config.fixed_bias);
    const auto env = instance.envelopes();
    return default_fixed_bias(env);
  };

  if (name == "TACC" || name == "DNC") {
    TaccPolicy policy(cfg, instance.envelopes(), params, name == "TACC");
    run_to_budget(episode, policy);
    rec.horizon_clamps = policy.horizon_clamps();
  } else if (name == "MF-UCB") {
    MfUcbPolicy policy(cfg, fixed_bias(), params.gamma);
    run_to_budget(episode, policy);
  } else if (name == "UCB") {
    UcbHighPolicy policy(cfg);
    run_to_budget(episode, policy);
  } else if (name == "STATIC-ELIM") {
    StaticEliminationPolicy policy(cfg, fixed_bias(), params.gamma);
    run_to_budget(episode, policy);
  } else {
    RdfeResult r = rdfe_run(episode);
    rec.returned_arm = r.returned_arm;
    if (config.keep_logs) rec.rdfe = std::move(r);
  }

  rec.checkpoints = checkpoint_values(episode.log(), config.checkpoints);
  rec.arm_counts.reserve(instance.num_arms());
  for (const ArmState& s : episode.state().arms) rec.arm_counts.push_back({s.low.count(), s.high.count(), s.continuation});
  rec.final_cost = episode.state().cost;
  rec.final_regret = episode.regret();
  rec.low_calls = episode.low_calls();
  rec.high_calls = episode.high_calls();
  rec.continuation_calls = episode.continuation_calls();
  rec.coverage_held = episode.coverage_held();
  rec.concentration_held = episode.concentration_held();
  if (config.keep_logs) rec.log = episode.log();
  return rec;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::string> methods;
  for (const auto& m : config.methods) methods.push_back(canonical_method(m));
  const std::string digest = config_digest(config);

  const Count n_seeds = config.seed_count;
  std::vector<std::vector<RunRecord>> per_seed(n_seeds);
  std::atomic<Count> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (Count i = next++; i < n_seeds; i = next++) {
      try {
        const std::uint64_t seed = config.seed_first + i;
        const BanditInstance instance = build_instance(config, seed);
        for (const auto& m : methods) {
          RunRecord rec = run_method(config, instance, m, seed);
          rec.run_id = make_run_id(digest, seed, m);
          per_seed[i].push_back(std::move(rec));
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_seeds;
      }
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(n_seeds)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RunRecord> out;
  out.reserve(n_seeds * methods.size());
  for (auto& v : per_seed) {
    for (auto& r : v) out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) {
    return a.method != b.method ? a.method < b.method : a.seed < b.seed;
  });
  return out;
}

std::vector<RunRow> flatten(const std::vector<RunRecord>& records) {
  std::vector<RunRow> rows;
  for (const auto& r : records) {
    for (const auto& cp : r.checkpoints) {
      rows.push_back({r.run_id, r.seed, r.method, cp.budget, cp.regret, cp.low_calls, cp.high_calls,
                      cp.continuation_calls, r.coverage_held});
    }
  }
  return rows;
}

MeanSe mean_se(std::span<const double> values) {
  MeanSe out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  out.mean = sum / n;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

namespace {

std::vector<std::string> reporting_order(const std::vector<RunRow>& rows) {
  std::set<std::string> present;
  for (const auto& r : rows) present.insert(r.method);
  std::vector<std::string> order;
  for (const auto& m : known_methods()) {
    if (present.erase(m)) order.push_back(m);
  }
  for (const auto& m : present) order.push_back(m);
  return order;
}

}  // namespace

SummaryStats summarize(const std::vector<RunRow>& rows) {
  // (method, budget) -> seed -> regret; std::map keeps seeds ordered.
  std::map<std::pair<std::string, double>, std::map<std::uint64_t, double>> cells;
  std::set<double> budgets;
  for (const auto& r : rows) {
    cells[{r.method, r.budget}][r.seed] = r.regret;
    budgets.insert(r.budget);
  }
  const auto order = reporting_order(rows);

  SummaryStats out;
  for (const auto& m : order) {
    for (double b : budgets) {
      auto it = cells.find({m, b});
      if (it == cells.end()) continue;
      std::vector<double> v;
      for (const auto& [seed, regret] : it->second) v.push_back(regret);
      const MeanSe ms = mean_se(v);
      out.methods.push_back({m, b, ms.mean, ms.se, v.size()});
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      for (double b : budgets) {
        auto ia = cells.find({order[i], b});
        auto ib = cells.find({order[j], b});
        if (ia == cells.end() || ib == cells.end()) continue;
        std::vector<double> diffs;
        for (const auto& [seed, ra] : ia->second) {
          auto hit = ib->second.find(seed);
          if (hit != ib->second.end()) diffs.push_back(ra - hit->second);
        }
        if (diffs.empty()) continue;
        const MeanSe ms = mean_se(diffs);
        out.paired.push_back({order[i], order[j], b, ms.mean, ms.se, ms.mean - kZ95 * ms.se, ms.mean + kZ95 * ms.se,
                              diffs.size()});
      }
    }
  }
  return out;
}

SummaryStats summarize(const std::vector<RunRecord>& records) { return summarize(flatten(records)); }

}  // namespace mfb
