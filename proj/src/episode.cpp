#include "mfb/episode.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mfb {

std::string_view to_string(ActionReason r) {
  switch (r) {
    case ActionReason::Initialization: return "init";
    case ActionReason::PreThresholdLow: return "pre-threshold";
    case ActionReason::ContinuationLow: return "continuation";
    case ActionReason::Escalate: return "escalate";
    case ActionReason::PhaseQuery: return "phase";
  }
  return "?";
}

namespace {

Rng stream_for(std::uint64_t seed, Index arm, Fidelity f) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(arm), static_cast<std::uint32_t>(arm >> 32),
                    static_cast<std::uint32_t>(f), 0x6f627376u};
  return Rng(seq);
}

}  // namespace

Episode::Episode(const BanditInstance& instance, const ConfidenceConfig& cfg, double budget, std::uint64_t seed)
    : instance_(&instance), cfg_(&cfg), budget_(budget) {
  const std::size_t k = instance.num_arms();
  if (cfg.num_arms() != k) throw ConfigError("confidence config K does not match the instance");
  state_.arms.resize(k);
  streams_.reserve(2 * k);
  for (Index a = 0; a < k; ++a) {
    streams_.push_back(stream_for(seed, a, Fidelity::Low));
    streams_.push_back(stream_for(seed, a, Fidelity::High));
  }
  low_mean_prefix_.assign(k, std::vector<double>{0.0});
}

void Episode::warm_start() {
  const auto& c = instance_->costs();
  const double need = static_cast<double>(instance_->num_arms()) * (c.low() + c.high());
  if (need > budget_) {
    throw ConfigError("budget " + std::to_string(budget_) + " cannot cover the warm start cost " +
                      std::to_string(need));
  }
  for (Index a = 0; a < instance_->num_arms(); ++a) {
    pull(a, Fidelity::Low, ActionReason::Initialization);
    pull(a, Fidelity::High, ActionReason::Initialization);
  }
}

void Episode::pull(Index arm, Fidelity fidelity, ActionReason reason) {
  ArmState& s = state_.arms.at(arm);
  ActionRecord rec;
  rec.round = state_.round + 1;
  rec.arm = arm;
  rec.fidelity = fidelity;
  rec.reason = reason;
  rec.low_count_before = s.low.count();
  rec.high_count_before = s.high.count();

  Rng& rng = streams_[2 * arm + (fidelity == Fidelity::High ? 1 : 0)];
  const double y = sample_observation(*instance_, arm, fidelity, s.low.count(), rng);
  if (fidelity == Fidelity::Low) {
    const double m = instantaneous_low_mean(instance_->arm(arm), s.low.count() + 1, instance_->clip_means());
    auto& prefix = low_mean_prefix_[arm];
    prefix.push_back(prefix.back() + m);
    s.low.add(y);
    ++low_calls_;
    if (reason == ActionReason::ContinuationLow) {
      ++s.continuation;
      ++continuation_calls_;
    }
  } else {
    s.high.add(y);
    ++high_calls_;
  }

  const double cost = instance_->costs().of(fidelity);
  state_.cost += cost;
  ++state_.round;
  regret_ += cost * instance_->gap(arm);
  rec.cost_after = state_.cost;
  rec.regret_after = regret_;
  log_.push_back(rec);
  check_intervals(arm, fidelity);
}

double Episode::low_selected_average(Index arm, Count n) const {
  const auto& prefix = low_mean_prefix_.at(arm);
  if (n == 0 || n >= prefix.size()) throw std::domain_error("selected average outside observed range");
  return prefix[n] / static_cast<double>(n);
}

void Episode::check_intervals(Index arm, Fidelity fidelity) {
  const ArmState& s = state_.arms[arm];
  const double mu = instance_->arm(arm).mu_high;
  if (fidelity == Fidelity::Low) {
    const Count n = s.low.count();
    const Interval iv = low_bounds(*cfg_, s.low, instance_->arm(arm).envelope);
    if (!iv.contains(mu)) coverage_held_ = false;
    if (std::fabs(s.low.mean() - low_selected_average(arm, n)) > radius(*cfg_, n)) concentration_held_ = false;
  } else {
    const Interval iv = high_bounds(*cfg_, s.high);
    if (!iv.contains(mu)) {
      coverage_held_ = false;
      concentration_held_ = false;
    }
  }
}

StepStatus step(Episode& episode, Policy& policy) {
  const std::optional<Action> a = policy.decide(episode.state());
  if (!a) return StepStatus::Finished;
  if (!episode.affordable(a->fidelity)) return StepStatus::Halted;
  episode.pull(a->arm, a->fidelity, a->reason);
  return StepStatus::Pulled;
}

void run_to_budget(Episode& episode, Policy& policy) {
  if (episode.state().round == 0) episode.warm_start();
  while (step(episode, policy) == StepStatus::Pulled) {
  }
}

}  // namespace mfb
