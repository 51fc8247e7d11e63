#pragma once

#include <cmath>

#include "mfb/envelope.hpp"
#include "mfb/types.hpp"

namespace mfb {

/// Budget-uniform radius G(n) = sqrt(l / n), l = rho * ln(2 K T / delta).
class ConfidenceConfig {
 public:
  ConfidenceConfig(double rho, double delta, std::size_t num_arms, Count budget_queries);

  double rho() const { return rho_; }
  double delta() const { return delta_; }
  std::size_t num_arms() const { return num_arms_; }
  /// T = ceil(budget / low cost), the query horizon.
  Count budget_queries() const { return budget_queries_; }
  /// l = rho * ln(2 K T / delta), natural log.
  double log_factor() const { return log_factor_; }

 private:
  double rho_;
  double delta_;
  std::size_t num_arms_;
  Count budget_queries_;
  double log_factor_;
};

/// T = ceil(budget / low_cost).
Count query_horizon(double budget, double low_cost);

/// Running count and mean of one arm at one fidelity.
class FidelityStats {
 public:
  void add(double y) {
    ++count_;
    sum_ += y;
  }
  Count count() const { return count_; }
  double sum() const { return sum_; }
  /// Only meaningful when count() >= 1.
  double mean() const { return sum_ / static_cast<double>(count_); }

 private:
  Count count_ = 0;
  double sum_ = 0.0;
};

struct Interval {
  double lcb;
  double ucb;
  double width() const { return ucb - lcb; }
  bool contains(double x) const { return lcb <= x && x <= ucb; }
};

/// sqrt(l / n); std::domain_error when n == 0.
double radius(const ConfidenceConfig& cfg, Count n);

/// mean -/+ (G(n) + B(n)).
Interval low_bounds(const ConfidenceConfig& cfg, const FidelityStats& stats, const MismatchEnvelope& envelope);
/// As low_bounds with a fixed bias in place of B(n) (static multi-fidelity rule).
Interval low_bounds_fixed_bias(const ConfidenceConfig& cfg, const FidelityStats& stats, double bias);
/// mean -/+ G(n).
Interval high_bounds(const ConfidenceConfig& cfg, const FidelityStats& stats);

inline double aggregate_ucb(double low_ucb, double high_ucb) { return std::fmin(low_ucb, high_ucb); }

/// Smallest n >= 1 with G(n) < gamma.
Count n_gamma(const ConfidenceConfig& cfg, double gamma);

}  // namespace mfb
