#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "mfb/types.hpp"

namespace mfb {

/// Known certificate on the low/high discrepancy of one arm.
///
/// U(n) bounds the cumulative absolute discrepancy of the first n low-fidelity
/// queries and B(n) = sup_{n <= s <= horizon} U(s)/s is the selected-average
/// bound added to low-fidelity confidence intervals. Both tables are computed
/// once at construction over [1, horizon] and shared between copies, so an
/// envelope is cheap to copy and safe to read from several threads.
class MismatchEnvelope {
 public:
  /// Per-query term zeta * tau^(-r).
  struct PowerLaw {
    double zeta;
    double r;
  };
  /// Per-query term |b + a * (tau + n0)^(-r)|.
  struct Residual {
    double b;
    double a;
    Count n0;
    double r;
  };
  /// Per-query term zeta (a static bias bound).
  struct Constant {
    double zeta;
  };
  /// U(1..m) given directly. Beyond m the sum is held flat.
  struct TabulatedPrefix {
    std::vector<double> prefix_sums;
  };
  using Kind = std::variant<PowerLaw, Residual, Constant, TabulatedPrefix>;

  MismatchEnvelope(Kind kind, Count horizon);

  const Kind& kind() const { return kind_; }
  Count horizon() const { return horizon_; }

  /// U(n) for 0 <= n <= horizon, U(0) = 0.
  double cumulative(Count n) const;

  /// B(n); throws std::domain_error unless 1 <= n <= horizon.
  double bound(Count n) const;

  /// B(n) with n > horizon clamped to B(horizon). n must be >= 1.
  double bound_clamped(Count n) const;

  /// True when U(n)/n itself is nonincreasing, i.e. the supremum in B is
  /// attained at s = n for every n.
  bool average_is_nonincreasing() const;

 private:
  Kind kind_;
  Count horizon_;
  std::shared_ptr<const std::vector<double>> cumulative_;  // index n in [0, horizon]
  std::shared_ptr<const std::vector<double>> bound_;       // index n in [0, horizon], [0] unused
};

/// Free-function spelling of MismatchEnvelope::bound.
inline double envelope_B(const MismatchEnvelope& envelope, Count n) { return envelope.bound(n); }

}  // namespace mfb
