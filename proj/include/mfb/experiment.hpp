#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfb/episode.hpp"
#include "mfb/instance.hpp"
#include "mfb/policies.hpp"
#include "mfb/rdfe.hpp"

namespace mfb {

enum class EnvFamily { Synthetic, Residual, Vanishing, Checkpoint5Arm };

struct ExperimentConfig {
  std::string preset;  // informational, empty for fully inline configs
  EnvFamily family = EnvFamily::Synthetic;
  SyntheticSpec synthetic;
  ProxyParams proxy;

  TaccParams tacc;
  double rho = 2.0;
  double delta = 0.05;
  /// Uniform fixed bias for the static rules; unset means zeta_k = B_k(1).
  std::optional<double> fixed_bias;

  double budget = 100000.0;
  std::vector<double> checkpoints;  // ascending, last == budget

  std::uint64_t seed_first = 0;
  Count seed_count = 10;
  std::vector<std::string> methods{"TACC", "DNC", "MF-UCB", "UCB"};

  std::string out_dir = "out";
  unsigned jobs = 1;
  /// Keep action logs and RDFE phase records on the run records.
  bool keep_logs = false;

  CostModel costs() const;
  std::size_t num_arms() const;
  Count query_horizon() const;
  ConfidenceConfig confidence() const;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Canonical method names in reporting order.
const std::vector<std::string>& known_methods();
/// Case-insensitive lookup; ConfigError for unknown names.
std::string canonical_method(const std::string& name);

/// Seeded instance for one seed; identical for every method.
BanditInstance build_instance(const ExperimentConfig& config, std::uint64_t seed);

struct CheckpointValue {
  double budget = 0.0;
  double regret = 0.0;
  Count low_calls = 0;
  Count high_calls = 0;
  Count continuation_calls = 0;
};

struct ArmCounts {
  Count low = 0;
  Count high = 0;
  Count continuation = 0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::string method;
  std::string run_id;
  std::vector<CheckpointValue> checkpoints;
  std::vector<ArmCounts> arm_counts;
  double final_cost = 0.0;
  double final_regret = 0.0;
  Count low_calls = 0;
  Count high_calls = 0;
  Count continuation_calls = 0;
  bool coverage_held = true;
  bool concentration_held = true;
  Count horizon_clamps = 0;
  std::optional<Index> returned_arm;  // RDFE only
  std::vector<ActionRecord> log;      // keep_logs only
  std::optional<RdfeResult> rdfe;     // keep_logs only
};

/// Runs one method on one instance to budget exhaustion.
RunRecord run_method(const ExperimentConfig& config, const BanditInstance& instance, const std::string& method,
                     std::uint64_t seed);

/// Every (seed, method) pair; records sorted by (method, seed).
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

/// Values at the last logged action whose cumulative cost is <= each checkpoint.
std::vector<CheckpointValue> checkpoint_values(std::span<const ActionRecord> log, std::span<const double> checkpoints);

/// Stable 16-hex-digit FNV-1a digest.
std::string fnv1a_hex(std::string_view text);
std::string config_digest(const ExperimentConfig& config);
std::string make_run_id(const std::string& digest, std::uint64_t seed, const std::string& method);

struct MethodSummary {
  std::string method;
  double budget = 0.0;
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

struct PairedSummary {
  std::string method_a;
  std::string method_b;
  double budget = 0.0;
  double mean_diff = 0.0;  // a - b
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n = 0;
};

struct SummaryStats {
  std::vector<MethodSummary> methods;
  std::vector<PairedSummary> paired;
};

/// Flat view of one record at one checkpoint, as stored in runs.csv.
struct RunRow {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string method;
  double budget = 0.0;
  double regret = 0.0;
  Count low_calls = 0;
  Count high_calls = 0;
  Count continuation_calls = 0;
  bool coverage_held = true;
};

std::vector<RunRow> flatten(const std::vector<RunRecord>& records);

/// Mean and standard error (sample sd / sqrt(n); 0 for n < 2).
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_se(std::span<const double> values);

/// Normal-approximation 95% interval, mean +/- 1.96 SE.
inline constexpr double kZ95 = 1.96;

/// Per-(method, budget) mean and SE; paired differences over common seeds for
/// every method pair in reporting order.
SummaryStats summarize(const std::vector<RunRow>& rows);
SummaryStats summarize(const std::vector<RunRecord>& records);

}  // namespace mfb
