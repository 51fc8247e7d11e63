#pragma once

#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfb/episode.hpp"

namespace mfb {

struct TaccParams {
  double gamma = 0.063;
  double eta = 1e-4;
  Count s0 = 10;
  double budget = 0.0;

  /// Throws ConfigError on gamma <= 0, eta outside (0,1) or S0 * low > high.
  void validate(const CostModel& costs) const;
};

/// V(s) = B(n_low) - B(n_low + s). Values past the envelope horizon read
/// B(horizon); `clamped` (if given) is set when that happened.
double continuation_gain(const MismatchEnvelope& envelope, Count n_low, Count s, bool* clamped = nullptr);

/// argmax_k min(low UCB, high UCB); ties go to the lowest index.
Index tacc_select_arm(const PolicyState& state, const ConfidenceConfig& cfg,
                      std::span<const MismatchEnvelope> envelopes);

/// Fidelity rule for an already selected arm. Low while G(N_low) >= gamma;
/// afterwards Low as a continuation pull while A_k < S0 and
/// V(S0 - A_k) >= 2 eta gamma (V is nondecreasing in s, so the largest
/// admissible s decides the existence test); otherwise High.
Action tacc_select_fidelity(const PolicyState& state, Index arm, const TaccParams& params,
                            const ConfidenceConfig& cfg, const MismatchEnvelope& envelope,
                            bool* clamped = nullptr);

/// TACC. With continuation disabled it is the DNC ablation: same bounds and
/// threshold, immediate escalation once the low radius drops below gamma.
class TaccPolicy final : public Policy {
 public:
  TaccPolicy(const ConfidenceConfig& cfg, std::vector<MismatchEnvelope> envelopes, TaccParams params,
             bool continuation = true);

  std::optional<Action> decide(const PolicyState& state) override;

  /// Number of continuation tests that looked past the envelope horizon.
  Count horizon_clamps() const { return clamps_; }
  const TaccParams& params() const { return params_; }

 private:
  const ConfidenceConfig* cfg_;
  std::vector<MismatchEnvelope> envelopes_;
  TaccParams params_;
  Count clamps_ = 0;
};

/// Static multi-fidelity switching rule: low intervals carry a fixed bias
/// zeta_k, and an arm escalates to High once its low radius drops below gamma.
class MfUcbPolicy final : public Policy {
 public:
  MfUcbPolicy(const ConfidenceConfig& cfg, std::vector<double> fixed_bias, double gamma);
  std::optional<Action> decide(const PolicyState& state) override;

 private:
  const ConfidenceConfig* cfg_;
  std::vector<double> bias_;
  double gamma_;
};

/// zeta_k = B_k(1) for every arm.
std::vector<double> default_fixed_bias(std::span<const MismatchEnvelope> envelopes);

/// Optimistic rule over high-fidelity bounds only.
class UcbHighPolicy final : public Policy {
 public:
  explicit UcbHighPolicy(const ConfidenceConfig& cfg) : cfg_(&cfg) {}
  std::optional<Action> decide(const PolicyState& state) override;

 private:
  const ConfidenceConfig* cfg_;
};

/// LUCB-style elimination with fixed-bias low intervals. Each activation
/// queues the two active arms with the largest aggregate UCB; an arm leaves
/// the active set once its aggregate UCB falls below the best aggregate LCB.
/// Finishes when one arm remains.
class StaticEliminationPolicy final : public Policy {
 public:
  StaticEliminationPolicy(const ConfidenceConfig& cfg, std::vector<double> fixed_bias, double gamma);
  std::optional<Action> decide(const PolicyState& state) override;

  const std::vector<Index>& active() const { return active_; }
  const std::vector<Index>& eliminated() const { return eliminated_; }

 private:
  Interval aggregate(const ArmState& s, Index k) const;
  void eliminate(const PolicyState& state);

  const ConfidenceConfig* cfg_;
  std::vector<double> bias_;
  double gamma_;
  std::vector<Index> active_;
  std::vector<Index> eliminated_;
  std::deque<Index> pending_;
};

}  // namespace mfb
