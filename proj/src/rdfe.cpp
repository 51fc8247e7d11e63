#include "mfb/rdfe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfb {
namespace {

bool low_certified(const ConfidenceConfig& cfg, const MismatchEnvelope& e, Count n, double target) {
  return radius(cfg, n) + e.bound_clamped(n) <= target;
}

bool high_certified(const ConfidenceConfig& cfg, Count n, double target) { return radius(cfg, n) <= target; }

Interval aggregate_interval(const ConfidenceConfig& cfg, const ArmState& s, const MismatchEnvelope& e) {
  const Interval lo = low_bounds(cfg, s.low, e);
  const Interval hi = high_bounds(cfg, s.high);
  return {std::max(lo.lcb, hi.lcb), std::min(lo.ucb, hi.ucb)};
}

}  // namespace

std::optional<Count> rdfe_cert_queries(const ConfidenceConfig& cfg, const MismatchEnvelope& envelope,
                                       double epsilon, Fidelity fidelity) {
  if (!(epsilon > 0.0)) throw std::domain_error("certification resolution must be > 0");
  const double target = epsilon / 8.0;
  const Count horizon = cfg.budget_queries();
  if (fidelity == Fidelity::High) {
    const double exact = 64.0 * cfg.log_factor() / (epsilon * epsilon);
    if (exact > static_cast<double>(horizon) + 1.0) return std::nullopt;
    Count n = std::max<Count>(1, static_cast<Count>(std::ceil(exact)));
    while (n > 1 && high_certified(cfg, n - 1, target)) --n;
    while (n <= horizon && !high_certified(cfg, n, target)) ++n;
    if (n > horizon) return std::nullopt;
    return n;
  }
  // G + B is nonincreasing in n, so the feasible set is a suffix of [1, T].
  if (!low_certified(cfg, envelope, horizon, target)) return std::nullopt;
  Count lo = 1;
  Count hi = horizon;
  while (lo < hi) {
    const Count mid = lo + (hi - lo) / 2;
    if (low_certified(cfg, envelope, mid, target)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

double rdfe_cert_cost(const ConfidenceConfig& cfg, const MismatchEnvelope& envelope, const CostModel& costs,
                      double epsilon, Fidelity fidelity) {
  const auto n = rdfe_cert_queries(cfg, envelope, epsilon, fidelity);
  return n ? costs.of(fidelity) * static_cast<double>(*n) : kInfinity;
}

double rdfe_oracle_cost(const ConfidenceConfig& cfg, const MismatchEnvelope& envelope, const CostModel& costs,
                        double epsilon) {
  return std::min(rdfe_cert_cost(cfg, envelope, costs, epsilon, Fidelity::Low),
                  rdfe_cert_cost(cfg, envelope, costs, epsilon, Fidelity::High));
}

RdfeResult rdfe_run(Episode& episode) {
  const BanditInstance& inst = episode.instance();
  const ConfidenceConfig& cfg = episode.confidence();
  const CostModel& costs = inst.costs();
  episode.warm_start();

  RdfeResult result;
  std::vector<Index> active(inst.num_arms());
  for (Index k = 0; k < active.size(); ++k) active[k] = k;

  {
    double best = -kInfinity;
    for (Index k : active) {
      const double lcb = aggregate_interval(cfg, episode.state().arms[k], inst.arm(k).envelope).lcb;
      if (lcb > best) {
        best = lcb;
        result.returned_arm = k;
      }
    }
  }

  for (int r = 1; active.size() > 1; ++r) {
    RdfePhase phase;
    phase.r = r;
    phase.epsilon = std::ldexp(1.0, -r);
    phase.active = active;
    const double target = phase.epsilon / 8.0;

    for (Index k : active) {
      const MismatchEnvelope& env = inst.arm(k).envelope;
      RdfeArmPhase ap;
      ap.arm = k;
      const double c_low = rdfe_cert_cost(cfg, env, costs, phase.epsilon, Fidelity::Low);
      const double c_high = rdfe_cert_cost(cfg, env, costs, phase.epsilon, Fidelity::High);
      ap.fidelity = c_low <= c_high ? Fidelity::Low : Fidelity::High;
      ap.oracle_cost = std::min(c_low, c_high);

      const double cost_before = episode.state().cost;
      auto done = [&] {
        const ArmState& s = episode.state().arms[k];
        return ap.fidelity == Fidelity::Low ? low_certified(cfg, env, s.low.count(), target)
                                            : high_certified(cfg, s.high.count(), target);
      };
      while (!done()) {
        if (!episode.affordable(ap.fidelity)) {
          ap.cost_spent = episode.state().cost - cost_before;
          phase.arms.push_back(ap);
          result.phases.push_back(std::move(phase));
          result.budget_exhausted = true;
          return result;
        }
        episode.pull(k, ap.fidelity, ActionReason::PhaseQuery);
      }
      ap.cost_spent = episode.state().cost - cost_before;
      const ArmState& s = episode.state().arms[k];
      ap.bounds = ap.fidelity == Fidelity::Low ? low_bounds(cfg, s.low, env) : high_bounds(cfg, s.high);
      phase.arms.push_back(ap);
    }

    double leader_lcb = -kInfinity;
    for (const auto& ap : phase.arms) {
      if (ap.bounds.lcb > leader_lcb) {
        leader_lcb = ap.bounds.lcb;
        phase.lcb_leader = ap.arm;
      }
    }
    double out_lcb = -kInfinity;
    for (const auto& ap : phase.arms) {
      if (ap.bounds.ucb >= leader_lcb - phase.epsilon / 4.0) {
        phase.survivors.push_back(ap.arm);
        if (ap.bounds.lcb > out_lcb) {
          out_lcb = ap.bounds.lcb;
          result.returned_arm = ap.arm;
        }
      }
    }
    phase.completed = true;
    active = phase.survivors;
    result.phases.push_back(std::move(phase));
  }
  if (active.size() == 1) result.returned_arm = active.front();
  return result;
}

}  // namespace mfb
