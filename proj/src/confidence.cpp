#include "mfb/confidence.hpp"

#include <stdexcept>

namespace mfb {

ConfidenceConfig::ConfidenceConfig(double rho, double delta, std::size_t num_arms, Count budget_queries)
    : rho_(rho), delta_(delta), num_arms_(num_arms), budget_queries_(budget_queries) {
  if (!(rho > 0.0)) throw ConfigError("algo.rho must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("algo.delta must lie in (0, 1)");
  if (num_arms == 0 || budget_queries == 0) throw ConfigError("confidence config needs K >= 1 and T >= 1");
  const double arg = 2.0 * static_cast<double>(num_arms) * static_cast<double>(budget_queries) / delta;
  if (!(arg > 1.0)) throw ConfigError("2 K T / delta must exceed 1");
  log_factor_ = rho * std::log(arg);
}

Count query_horizon(double budget, double low_cost) {
  if (!(budget > 0.0) || !(low_cost > 0.0)) throw ConfigError("budget and low cost must be > 0");
  return static_cast<Count>(std::ceil(budget / low_cost));
}

double radius(const ConfidenceConfig& cfg, Count n) {
  if (n == 0) throw std::domain_error("confidence radius undefined at n = 0");
  return std::sqrt(cfg.log_factor() / static_cast<double>(n));
}

Interval low_bounds(const ConfidenceConfig& cfg, const FidelityStats& stats, const MismatchEnvelope& envelope) {
  const Count n = stats.count();
  if (n == 0) throw std::domain_error("low-fidelity bounds need at least one sample");
  const double w = radius(cfg, n) + envelope.bound_clamped(n);
  return {stats.mean() - w, stats.mean() + w};
}

Interval low_bounds_fixed_bias(const ConfidenceConfig& cfg, const FidelityStats& stats, double bias) {
  const Count n = stats.count();
  if (n == 0) throw std::domain_error("low-fidelity bounds need at least one sample");
  const double w = radius(cfg, n) + bias;
  return {stats.mean() - w, stats.mean() + w};
}

Interval high_bounds(const ConfidenceConfig& cfg, const FidelityStats& stats) {
  const Count n = stats.count();
  if (n == 0) throw std::domain_error("high-fidelity bounds need at least one sample");
  const double w = radius(cfg, n);
  return {stats.mean() - w, stats.mean() + w};
}

Count n_gamma(const ConfidenceConfig& cfg, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be > 0");
  const double ratio = cfg.log_factor() / (gamma * gamma);
  auto n = static_cast<Count>(std::floor(ratio)) + 1;
  // Settle rounding at the boundary against the radius predicate itself.
  while (n > 1 && radius(cfg, n - 1) < gamma) --n;
  while (!(radius(cfg, n) < gamma)) ++n;
  return n;
}

}  // namespace mfb
