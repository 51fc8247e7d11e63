#include "mfb/policies.hpp"

#include <algorithm>
#include <numeric>

namespace mfb {

void TaccParams::validate(const CostModel& costs) const {
  if (!(gamma > 0.0)) throw ConfigError("algo.gamma must be > 0");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("algo.eta must lie in (0, 1)");
  if (static_cast<double>(s0) * costs.low() > costs.high()) {
    throw ConfigError("continuation cost constraint violated: algo.s0 * costs.low must not exceed costs.high");
  }
}

double continuation_gain(const MismatchEnvelope& envelope, Count n_low, Count s, bool* clamped) {
  if (s == 0) throw std::domain_error("continuation gain needs s >= 1");
  if (clamped) *clamped = n_low + s > envelope.horizon();
  return envelope.bound_clamped(n_low) - envelope.bound_clamped(n_low + s);
}

Index tacc_select_arm(const PolicyState& state, const ConfidenceConfig& cfg,
                      std::span<const MismatchEnvelope> envelopes) {
  Index best = 0;
  double best_ucb = -kInfinity;
  for (Index k = 0; k < state.arms.size(); ++k) {
    const ArmState& s = state.arms[k];
    const double u = aggregate_ucb(low_bounds(cfg, s.low, envelopes[k]).ucb, high_bounds(cfg, s.high).ucb);
    if (u > best_ucb) {
      best_ucb = u;
      best = k;
    }
  }
  return best;
}

Action tacc_select_fidelity(const PolicyState& state, Index arm, const TaccParams& params,
                            const ConfidenceConfig& cfg, const MismatchEnvelope& envelope, bool* clamped) {
  const ArmState& s = state.arms.at(arm);
  const Count n_low = s.low.count();
  if (radius(cfg, n_low) >= params.gamma) return {arm, Fidelity::Low, ActionReason::PreThresholdLow};
  if (s.continuation < params.s0) {
    const double gain = continuation_gain(envelope, n_low, params.s0 - s.continuation, clamped);
    if (gain >= 2.0 * params.eta * params.gamma) return {arm, Fidelity::Low, ActionReason::ContinuationLow};
  }
  return {arm, Fidelity::High, ActionReason::Escalate};
}

TaccPolicy::TaccPolicy(const ConfidenceConfig& cfg, std::vector<MismatchEnvelope> envelopes, TaccParams params,
                       bool continuation)
    : cfg_(&cfg), envelopes_(std::move(envelopes)), params_(params) {
  if (!continuation) params_.s0 = 0;
}

std::optional<Action> TaccPolicy::decide(const PolicyState& state) {
  const Index arm = tacc_select_arm(state, *cfg_, envelopes_);
  bool clamped = false;
  Action a = tacc_select_fidelity(state, arm, params_, *cfg_, envelopes_[arm], &clamped);
  if (clamped) ++clamps_;
  return a;
}

std::vector<double> default_fixed_bias(std::span<const MismatchEnvelope> envelopes) {
  std::vector<double> out;
  out.reserve(envelopes.size());
  for (const auto& e : envelopes) out.push_back(e.bound(1));
  return out;
}

MfUcbPolicy::MfUcbPolicy(const ConfidenceConfig& cfg, std::vector<double> fixed_bias, double gamma)
    : cfg_(&cfg), bias_(std::move(fixed_bias)), gamma_(gamma) {
  if (bias_.size() != cfg.num_arms()) throw ConfigError("fixed bias list must have one entry per arm");
}

std::optional<Action> MfUcbPolicy::decide(const PolicyState& state) {
  Index best = 0;
  double best_ucb = -kInfinity;
  for (Index k = 0; k < state.arms.size(); ++k) {
    const ArmState& s = state.arms[k];
    const double u =
        aggregate_ucb(low_bounds_fixed_bias(*cfg_, s.low, bias_[k]).ucb, high_bounds(*cfg_, s.high).ucb);
    if (u > best_ucb) {
      best_ucb = u;
      best = k;
    }
  }
  if (radius(*cfg_, state.arms[best].low.count()) >= gamma_) {
    return Action{best, Fidelity::Low, ActionReason::PreThresholdLow};
  }
  return Action{best, Fidelity::High, ActionReason::Escalate};
}

std::optional<Action> UcbHighPolicy::decide(const PolicyState& state) {
  Index best = 0;
  double best_ucb = -kInfinity;
  for (Index k = 0; k < state.arms.size(); ++k) {
    const double u = high_bounds(*cfg_, state.arms[k].high).ucb;
    if (u > best_ucb) {
      best_ucb = u;
      best = k;
    }
  }
  return Action{best, Fidelity::High, ActionReason::Escalate};
}

StaticEliminationPolicy::StaticEliminationPolicy(const ConfidenceConfig& cfg, std::vector<double> fixed_bias,
                                                 double gamma)
    : cfg_(&cfg), bias_(std::move(fixed_bias)), gamma_(gamma) {
  if (bias_.size() != cfg.num_arms()) throw ConfigError("fixed bias list must have one entry per arm");
  active_.resize(cfg.num_arms());
  std::iota(active_.begin(), active_.end(), Index{0});
}

Interval StaticEliminationPolicy::aggregate(const ArmState& s, Index k) const {
  const Interval lo = low_bounds_fixed_bias(*cfg_, s.low, bias_[k]);
  const Interval hi = high_bounds(*cfg_, s.high);
  return {std::max(lo.lcb, hi.lcb), std::min(lo.ucb, hi.ucb)};
}

void StaticEliminationPolicy::eliminate(const PolicyState& state) {
  double best_lcb = -kInfinity;
  for (Index k : active_) best_lcb = std::max(best_lcb, aggregate(state.arms[k], k).lcb);
  std::vector<Index> keep;
  keep.reserve(active_.size());
  for (Index k : active_) {
    if (aggregate(state.arms[k], k).ucb < best_lcb) {
      eliminated_.push_back(k);
    } else {
      keep.push_back(k);
    }
  }
  active_ = std::move(keep);
  std::erase_if(pending_, [&](Index k) { return std::find(active_.begin(), active_.end(), k) == active_.end(); });
}

std::optional<Action> StaticEliminationPolicy::decide(const PolicyState& state) {
  eliminate(state);
  if (active_.size() <= 1) return std::nullopt;
  if (pending_.empty()) {
    Index first = active_[0];
    Index second = active_[1];
    double u1 = -kInfinity;
    double u2 = -kInfinity;
    for (Index k : active_) {
      const double u = aggregate(state.arms[k], k).ucb;
      if (u > u1) {
        second = first;
        u2 = u1;
        first = k;
        u1 = u;
      } else if (u > u2) {
        second = k;
        u2 = u;
      }
    }
    pending_.push_back(first);
    pending_.push_back(second);
  }
  const Index arm = pending_.front();
  pending_.pop_front();
  if (radius(*cfg_, state.arms[arm].low.count()) >= gamma_) {
    return Action{arm, Fidelity::Low, ActionReason::PreThresholdLow};
  }
  return Action{arm, Fidelity::High, ActionReason::Escalate};
}

}  // namespace mfb
