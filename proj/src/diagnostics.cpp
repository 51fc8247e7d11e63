#include "mfb/diagnostics.hpp"

#include <cmath>

#include "mfb/rdfe.hpp"

namespace mfb {

double effective_low_gap(double mu_star, const ArmSpec& arm, Count n, bool clip) {
  if (n == 0) throw std::domain_error("effective gap needs n >= 1");
  double sum = 0.0;
  for (Count tau = 1; tau <= n; ++tau) sum += instantaneous_low_mean(arm, tau, clip);
  return mu_star - sum / static_cast<double>(n) - arm.envelope.bound_clamped(n);
}

std::optional<Count> certification_time(double mu_star, const ArmSpec& arm, double gamma, Count horizon,
                                        bool clip) {
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be > 0");
  double sum = 0.0;
  for (Count n = 1; n <= horizon; ++n) {
    sum += instantaneous_low_mean(arm, n, clip);
    const double gap = mu_star - sum / static_cast<double>(n) - arm.envelope.bound_clamped(n);
    if (gap >= 2.0 * gamma) return n;
  }
  return std::nullopt;
}

std::string_view to_string(ArmClass c) {
  switch (c) {
    case ArmClass::Optimal: return "opt";
    case ArmClass::A: return "A";
    case ArmClass::B: return "B";
    case ArmClass::C: return "C";
  }
  return "?";
}

std::size_t ArmPartition::count(ArmClass c) const {
  std::size_t n = 0;
  for (auto x : classes) n += x == c;
  return n;
}

ArmPartition partition_arms(const BanditInstance& instance, const ConfidenceConfig& cfg, double gamma, Count s0) {
  ArmPartition p;
  p.n_gamma = n_gamma(cfg, gamma);
  p.s0 = s0;
  const std::size_t k = instance.num_arms();
  p.tau.resize(k);
  p.classes.resize(k, ArmClass::Optimal);
  p.detected.assign(k, false);
  const double mu_star = instance.mu_star();
  for (Index a = 0; a < k; ++a) {
    if (a == instance.best_arm()) continue;
    p.tau[a] = certification_time(mu_star, instance.arm(a), gamma, cfg.budget_queries(), instance.clip_means());
    if (p.tau[a] && *p.tau[a] <= p.n_gamma) {
      p.classes[a] = ArmClass::A;
    } else if (!p.tau[a] || *p.tau[a] > p.n_gamma + s0) {
      p.classes[a] = ArmClass::B;
    } else {
      p.classes[a] = ArmClass::C;
    }
  }
  return p;
}

ArmPartition classify_detected(ArmPartition p, std::span<const ActionRecord> log, Count query_horizon) {
  for (Index a = 0; a < p.classes.size(); ++a) {
    p.detected[a] = false;
    if (p.classes[a] != ArmClass::C) continue;
    const Count tau = *p.tau[a];
    bool reached = false;
    bool high_in_window = false;
    for (const ActionRecord& rec : log) {
      if (rec.arm != a) continue;
      if (rec.fidelity == Fidelity::High && rec.low_count_before >= p.n_gamma && rec.low_count_before < tau) {
        high_in_window = true;
        break;
      }
      if (rec.fidelity == Fidelity::Low && rec.low_count_before + 1 == tau) {
        // N_low equals tau from the next round on.
        reached = rec.round + 1 <= query_horizon + 1;
        break;
      }
    }
    p.detected[a] = reached && !high_in_window;
  }
  return p;
}

Count high_pull_cap(const ConfidenceConfig& cfg, double gap) {
  return 1 + static_cast<Count>(std::ceil(4.0 * cfg.log_factor() / (gap * gap)));
}

double theorem_bound(const BanditInstance& instance, const ConfidenceConfig& cfg, const ArmPartition& p) {
  const double lo = instance.costs().low();
  const double hi = instance.costs().high();
  const double ng = static_cast<double>(p.n_gamma);
  const double s0 = static_cast<double>(p.s0);
  double total = 0.0;
  for (Index a = 0; a < p.classes.size(); ++a) {
    const double gap = instance.gap(a);
    switch (p.classes[a]) {
      case ArmClass::Optimal:
        break;
      case ArmClass::A:
        total += gap * (lo * (ng + 1.0) + hi);
        break;
      case ArmClass::C:
        if (p.detected[a]) {
          total += gap * (lo * (ng + s0 + 1.0) + hi);
          break;
        }
        [[fallthrough]];
      case ArmClass::B:
        // Arms with zero gap contribute nothing whatever their pull count.
        if (gap > 0.0) total += gap * (lo * (ng + s0 + 1.0) + hi * static_cast<double>(high_pull_cap(cfg, gap)));
        break;
    }
  }
  return total;
}

double static_vs_adaptive_margin(double gap, const ConfidenceConfig& cfg, const CostModel& costs, Count s0) {
  const double confirm = std::ceil(4.0 * cfg.log_factor() / (gap * gap));
  return gap * (costs.high() * confirm - costs.low() * static_cast<double>(s0));
}

std::vector<BoundViolation> check_pull_bounds(const BanditInstance& instance, const ConfidenceConfig& cfg,
                                              const PolicyState& final_state, Count n_gamma, Count s0) {
  std::vector<BoundViolation> out;
  for (Index a = 0; a < instance.num_arms(); ++a) {
    const ArmState& s = final_state.arms[a];
    if (s.low.count() > n_gamma + s0 + 1) {
      out.push_back({a, "low pulls " + std::to_string(s.low.count()) + " > N_gamma + S0 + 1 = " +
                            std::to_string(n_gamma + s0 + 1)});
    }
    if (s.continuation > s0) out.push_back({a, "continuation pulls exceed S0"});
    const double gap = instance.gap(a);
    if (!(gap > 0.0)) continue;
    const Count cap = high_pull_cap(cfg, gap);
    if (s.high.count() > cap) {
      out.push_back({a, "high pulls " + std::to_string(s.high.count()) + " > " + std::to_string(cap)});
    }
  }
  return out;
}

Count count_selection_certificate_failures(const BanditInstance& instance, const ConfidenceConfig& cfg,
                                           std::span<const ActionRecord> log) {
  const std::size_t k = instance.num_arms();
  std::vector<std::vector<double>> prefix(k, std::vector<double>{0.0});
  const double mu_star = instance.mu_star();
  Count failures = 0;
  for (const ActionRecord& rec : log) {
    auto& pre = prefix[rec.arm];
    const ArmSpec& arm = instance.arm(rec.arm);
    if (rec.reason != ActionReason::Initialization && instance.gap(rec.arm) > 0.0) {
      const Count n = rec.low_count_before;
      const double gap_low = mu_star - pre[n] / static_cast<double>(n) - arm.envelope.bound_clamped(n);
      if (2.0 * radius(cfg, n) < gap_low) ++failures;
    }
    if (rec.fidelity == Fidelity::Low) {
      pre.push_back(pre.back() + instantaneous_low_mean(arm, rec.low_count_before + 1, instance.clip_means()));
    }
  }
  return failures;
}

double replay_regret(const BanditInstance& instance, std::span<const ActionRecord> log) {
  double total = 0.0;
  for (const ActionRecord& rec : log) total += instance.costs().of(rec.fidelity) * instance.gap(rec.arm);
  return total;
}

std::vector<DyadicProbe> dyadic_probe(const BanditInstance& instance, const ConfidenceConfig& cfg) {
  std::vector<DyadicProbe> out;
  for (Index a = 0; a < instance.num_arms(); ++a) {
    const double gap = instance.gap(a);
    if (!(gap > 0.0)) continue;
    DyadicProbe p;
    p.arm = a;
    p.r_k = 1;
    while (std::ldexp(1.0, -p.r_k) > gap / 2.0) ++p.r_k;
    for (int r = 1; r <= p.r_k; ++r) {
      p.sum_costs += rdfe_oracle_cost(cfg, instance.arm(a).envelope, instance.costs(), std::ldexp(1.0, -r));
    }
    p.terminal_cost = rdfe_oracle_cost(cfg, instance.arm(a).envelope, instance.costs(), std::ldexp(1.0, -p.r_k));
    p.ratio = std::isinf(p.terminal_cost) ? kInfinity : p.sum_costs / p.terminal_cost;
    out.push_back(p);
  }
  return out;
}

}  // namespace mfb
