#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfb/episode.hpp"
#include "mfb/policies.hpp"

namespace mfb {

/// mu* - (1/n) sum_{tau<=n} mu_low(tau) - B(n).
double effective_low_gap(double mu_star, const ArmSpec& arm, Count n, bool clip = false);

/// First n in [1, horizon] with effective_low_gap >= 2 gamma; nullopt if none.
std::optional<Count> certification_time(double mu_star, const ArmSpec& arm, double gamma, Count horizon,
                                        bool clip = false);

enum class ArmClass { Optimal, A, B, C };
std::string_view to_string(ArmClass c);

struct ArmPartition {
  Count n_gamma = 0;
  Count s0 = 0;
  std::vector<std::optional<Count>> tau;
  std::vector<ArmClass> classes;
  /// Pathwise-detected subset of class C; all false until classify_detected.
  std::vector<bool> detected;

  std::size_t count(ArmClass c) const;
};

/// Static classes: tau <= N_gamma -> A, tau > N_gamma + S0 (or none) -> B,
/// otherwise C. Certification times are scanned up to cfg.budget_queries().
ArmPartition partition_arms(const BanditInstance& instance, const ConfidenceConfig& cfg, double gamma, Count s0);

/// Marks the C arms whose low count reached tau_k by round T + 1 without any
/// High query while N_gamma <= N_low < tau_k.
ArmPartition classify_detected(ArmPartition partition, std::span<const ActionRecord> log, Count query_horizon);

/// Right-hand side of the TACC regret bound for one run's partition.
double theorem_bound(const BanditInstance& instance, const ConfidenceConfig& cfg, const ArmPartition& partition);

/// Delta [high * ceil(4 l / Delta^2) - low * S0]: per-arm saving of bounded
/// continuation over the static threshold rule.
double static_vs_adaptive_margin(double gap, const ConfidenceConfig& cfg, const CostModel& costs, Count s0);

/// 1 + ceil(4 l / Delta^2).
Count high_pull_cap(const ConfidenceConfig& cfg, double gap);

struct BoundViolation {
  Index arm = 0;
  std::string what;
};

/// N_low <= N_gamma + S0 + 1 for every arm and N_high <= 1 + ceil(4 l / Delta^2)
/// for every suboptimal arm of a finished run.
std::vector<BoundViolation> check_pull_bounds(const BanditInstance& instance, const ConfidenceConfig& cfg,
                                              const PolicyState& final_state, Count n_gamma, Count s0);

/// Replays the log: whenever a suboptimal arm was chosen after warm start,
/// 2 G(N_low) >= effective_low_gap(N_low) must have held. Returns the number
/// of rounds where it did not.
Count count_selection_certificate_failures(const BanditInstance& instance, const ConfidenceConfig& cfg,
                                           std::span<const ActionRecord> log);

/// Cost-weighted regret recomputed from the action log.
double replay_regret(const BanditInstance& instance, std::span<const ActionRecord> log);

struct DyadicProbe {
  Index arm = 0;
  int r_k = 0;  // min{r : 2^-r <= Delta/2}
  double sum_costs = 0.0;
  double terminal_cost = 0.0;
  double ratio = 0.0;  // sum / terminal; +inf when the terminal cost is infinite
};

/// Dyadic-regularity ratios of the oracle certification cost, suboptimal arms.
std::vector<DyadicProbe> dyadic_probe(const BanditInstance& instance, const ConfidenceConfig& cfg);

}  // namespace mfb
