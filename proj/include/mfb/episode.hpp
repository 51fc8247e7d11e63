#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mfb/confidence.hpp"
#include "mfb/instance.hpp"

namespace mfb {

enum class ActionReason : std::uint8_t {
  Initialization,
  PreThresholdLow,
  ContinuationLow,
  Escalate,
  PhaseQuery,  // RDFE resolution-phase queries
};

std::string_view to_string(ActionReason r);

struct Action {
  Index arm = 0;
  Fidelity fidelity = Fidelity::Low;
  ActionReason reason = ActionReason::PreThresholdLow;
  bool operator==(const Action&) const = default;
};

struct ArmState {
  FidelityStats low;
  FidelityStats high;
  Count continuation = 0;  // A_k
};

/// Everything a policy is allowed to read.
struct PolicyState {
  std::vector<ArmState> arms;
  double cost = 0.0;
  Count round = 0;
};

/// One executed query, in execution order.
struct ActionRecord {
  Count round = 0;  // 1-based, warm start included
  Index arm = 0;
  Fidelity fidelity = Fidelity::Low;
  ActionReason reason = ActionReason::Initialization;
  Count low_count_before = 0;
  Count high_count_before = 0;
  double cost_after = 0.0;
  double regret_after = 0.0;
};

/// A single budget-constrained run over one instance.
///
/// Owns the policy-visible state, the action log, and one observation stream
/// per (arm, fidelity) seeded from the run seed alone. Different policies run
/// with the same seed therefore see the same u-th observation of each arm at
/// each fidelity. The episode also tracks, with oracle access to the targets,
/// whether the confidence intervals stayed valid; policies never see this.
class Episode {
 public:
  Episode(const BanditInstance& instance, const ConfidenceConfig& cfg, double budget, std::uint64_t seed);

  /// One query per arm per fidelity. ConfigError if the budget cannot pay for it.
  void warm_start();

  bool affordable(Fidelity f) const { return state_.cost + instance_->costs().of(f) <= budget_; }

  /// Executes the query unconditionally; callers check affordable() first.
  void pull(Index arm, Fidelity fidelity, ActionReason reason);

  const PolicyState& state() const { return state_; }
  const std::vector<ActionRecord>& log() const { return log_; }
  const BanditInstance& instance() const { return *instance_; }
  const ConfidenceConfig& confidence() const { return *cfg_; }
  double budget() const { return budget_; }
  double regret() const { return regret_; }
  Count low_calls() const { return low_calls_; }
  Count high_calls() const { return high_calls_; }
  Count continuation_calls() const { return continuation_calls_; }

  /// Every low interval (radius + B) and high interval contained mu_high.
  bool coverage_held() const { return coverage_held_; }
  /// The concentration event behind the interval construction:
  /// |low mean - selected-average low mean| <= G and |high mean - mu_high| <= G.
  bool concentration_held() const { return concentration_held_; }

  /// Selected-average low mean of arm k over its first n low queries (n >= 1,
  /// n <= current low count).
  double low_selected_average(Index arm, Count n) const;

 private:
  void check_intervals(Index arm, Fidelity fidelity);

  const BanditInstance* instance_;
  const ConfidenceConfig* cfg_;
  double budget_;
  PolicyState state_;
  std::vector<ActionRecord> log_;
  std::vector<Rng> streams_;  // 2 per arm
  std::vector<std::vector<double>> low_mean_prefix_;  // per arm, index n
  double regret_ = 0.0;
  Count low_calls_ = 0;
  Count high_calls_ = 0;
  Count continuation_calls_ = 0;
  bool coverage_held_ = true;
  bool concentration_held_ = true;
};

class Policy {
 public:
  virtual ~Policy() = default;
  /// Next query, or nullopt when the policy has nothing left to do.
  virtual std::optional<Action> decide(const PolicyState& state) = 0;
};

enum class StepStatus { Pulled, Halted, Finished };

/// decide -> pre-query budget check -> pull. Halted leaves the state untouched.
StepStatus step(Episode& episode, Policy& policy);

/// Warm start (if not yet done) followed by steps until Halted or Finished.
void run_to_budget(Episode& episode, Policy& policy);

}  // namespace mfb
