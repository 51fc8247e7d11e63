#pragma once

#include <optional>
#include <vector>

#include "mfb/episode.hpp"

namespace mfb {

/// min{n in [1, T] : G(n) + B(n) <= eps/8} (Low) or min{n in [1, T] : G(n) <= eps/8}
/// (High), T = cfg.budget_queries(); nullopt when the set is empty.
std::optional<Count> rdfe_cert_queries(const ConfidenceConfig& cfg, const MismatchEnvelope& envelope,
                                       double epsilon, Fidelity fidelity);

/// Query count above times the fidelity cost, +infinity when unattainable.
double rdfe_cert_cost(const ConfidenceConfig& cfg, const MismatchEnvelope& envelope, const CostModel& costs,
                      double epsilon, Fidelity fidelity);

/// min of the two certification costs.
double rdfe_oracle_cost(const ConfidenceConfig& cfg, const MismatchEnvelope& envelope, const CostModel& costs,
                        double epsilon);

struct RdfeArmPhase {
  Index arm = 0;
  Fidelity fidelity = Fidelity::Low;
  double cost_spent = 0.0;   // additional cost during this phase
  double oracle_cost = 0.0;  // c_k*(eps_r)
  Interval bounds{0.0, 0.0};
};

struct RdfePhase {
  int r = 0;
  double epsilon = 0.0;
  std::vector<Index> active;  // S_r
  std::vector<RdfeArmPhase> arms;
  bool completed = false;
  Index lcb_leader = 0;
  std::vector<Index> survivors;  // S_{r+1}, completed phases only
};

struct RdfeResult {
  Index returned_arm = 0;
  std::vector<RdfePhase> phases;
  bool budget_exhausted = false;
};

/// Resolution-dependent fidelity elimination on an episode that has not been
/// warm-started yet. Dyadic phases eps_r = 2^-r; each active arm is driven to
/// width eps_r/4 at whichever fidelity certifies it more cheaply (ties go to
/// Low), then arms whose UCB falls below LCB_leader - eps_r/4 are dropped.
RdfeResult rdfe_run(Episode& episode);

}  // namespace mfb
