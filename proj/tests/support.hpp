#pragma once

// Shared fixtures and brute-force reference implementations for the tests.
// The references deliberately avoid the library's cached tables and closed
// forms: everything is recomputed from the per-query definitions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mfb/confidence.hpp"
#include "mfb/envelope.hpp"
#include "mfb/instance.hpp"
#include "mfb/policies.hpp"

namespace mfb::testing {

/// Per-query discrepancy term of an envelope kind (tau >= 1).
inline double ref_term(const MismatchEnvelope::Kind& kind, Count tau) {
  const double t = static_cast<double>(tau);
  if (const auto* p = std::get_if<MismatchEnvelope::PowerLaw>(&kind)) return p->zeta * std::pow(t, -p->r);
  if (const auto* r = std::get_if<MismatchEnvelope::Residual>(&kind)) {
    return std::fabs(r->b + r->a * std::pow(t + static_cast<double>(r->n0), -r->r));
  }
  if (const auto* c = std::get_if<MismatchEnvelope::Constant>(&kind)) return c->zeta;
  const auto& tab = std::get<MismatchEnvelope::TabulatedPrefix>(kind).prefix_sums;
  if (tau > tab.size()) return 0.0;
  return tab[tau - 1] - (tau >= 2 ? tab[tau - 2] : 0.0);
}

/// U(n) by direct summation.
inline double ref_U(const MismatchEnvelope::Kind& kind, Count n) {
  if (const auto* tab = std::get_if<MismatchEnvelope::TabulatedPrefix>(&kind)) {
    if (n == 0) return 0.0;
    const auto& v = tab->prefix_sums;
    return n <= v.size() ? v[n - 1] : v.back();
  }
  double s = 0.0;
  for (Count tau = 1; tau <= n; ++tau) s += ref_term(kind, tau);
  return s;
}

/// B(n) = max over s in [n, horizon] of U(s)/s, scanning every s.
inline double ref_B(const MismatchEnvelope::Kind& kind, Count n, Count horizon) {
  double best = -1.0;
  const bool tabulated = std::holds_alternative<MismatchEnvelope::TabulatedPrefix>(kind);
  double u = ref_U(kind, n - 1);
  for (Count s = n; s <= horizon; ++s) {
    u = tabulated ? ref_U(kind, s) : u + ref_term(kind, s);
    best = std::max(best, u / static_cast<double>(s));
  }
  return best;
}

inline double ref_log_factor(double rho, double delta, std::size_t k, Count t) {
  return rho * std::log(2.0 * static_cast<double>(k) * static_cast<double>(t) / delta);
}

inline double ref_radius(double ell, Count n) { return std::sqrt(ell / static_cast<double>(n)); }

/// Smallest n with G(n) < gamma, by linear scan.
inline Count ref_n_gamma(double ell, double gamma) {
  Count n = 1;
  while (!(ref_radius(ell, n) < gamma)) ++n;
  return n;
}

/// First n <= horizon where mu* - mean_low(n) - B(n) >= 2 gamma.
inline std::optional<Count> ref_certification_time(double mu_star, const ArmSpec& arm, double gamma, Count horizon) {
  for (Count n = 1; n <= horizon; ++n) {
    double sum = 0.0;
    for (Count tau = 1; tau <= n; ++tau) sum += arm.trajectory(tau);
    const double gap = mu_star - sum / static_cast<double>(n) - ref_B(arm.envelope.kind(), n, arm.envelope.horizon());
    if (gap >= 2.0 * gamma) return n;
  }
  return std::nullopt;
}

/// min{n <= T : G(n) (+ B(n) for Low) <= eps/8} times the cost; +inf if none.
inline double ref_cert_cost(double ell, Count t, const MismatchEnvelope& env, const CostModel& costs, double eps,
                            Fidelity f) {
  for (Count n = 1; n <= t; ++n) {
    double w = ref_radius(ell, n);
    if (f == Fidelity::Low) w += ref_B(env.kind(), std::min(n, env.horizon()), env.horizon());
    if (w <= eps / 8.0) return costs.of(f) * static_cast<double>(n);
  }
  return kInfinity;
}

/// Random envelope kind with modest parameters.
inline MismatchEnvelope::Kind random_kind(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  switch (pick(rng)) {
    case 0: return MismatchEnvelope::PowerLaw{2.0 * u01(rng), 0.1 + 1.4 * u01(rng)};
    case 1:
      return MismatchEnvelope::Residual{0.2 * u01(rng) - 0.1, 1.6 * u01(rng) - 0.8,
                                        static_cast<Count>(std::uniform_int_distribution<int>(0, 5)(rng)),
                                        0.2 + u01(rng)};
    case 2: return MismatchEnvelope::Constant{u01(rng)};
    default: {
      std::vector<double> prefix;
      const int len = std::uniform_int_distribution<int>(1, 40)(rng);
      double s = 0.0;
      for (int i = 0; i < len; ++i) prefix.push_back(s += u01(rng));
      return MismatchEnvelope::TabulatedPrefix{prefix};
    }
  }
}

/// Two-arm instance in which the suboptimal arm becomes certifiable by low
/// fidelity only after a short post-threshold continuation.
///
/// Arm 0 is optimal and unbiased. Arm 1's low-fidelity mean sits c above its
/// target for the first m queries and is exact afterwards, so U(n) = c min(n, m)
/// and B(n) = c m / n past m. The gap is placed so the effective low gap is
/// at most gamma/2 at N_gamma and at least 2 gamma halfway through the
/// continuation window.
struct ContinuationFixture {
  double rho = 2.0;
  double delta = 0.05;
  double budget = 20000.0;
  CostModel costs{1.0, 50.0};
  double sigma = 0.1;
  TaccParams params{1.0, 1e-4, 50, 20000.0};
  Count m = 20;
  double c = 3.0;
  double mu_best = 10.0;
  double gap = 0.0;
  Count n_gamma = 0;

  ConfidenceConfig confidence() const { return ConfidenceConfig(rho, delta, 2, query_horizon(budget, costs.low())); }

  BanditInstance build() {
    const ConfidenceConfig cfg = confidence();
    n_gamma = mfb::n_gamma(cfg, params.gamma);
    const double x = c * static_cast<double>(m);
    const double lo = 2.0 * params.gamma + 2.0 * x / static_cast<double>(n_gamma + params.s0 / 2);
    const double hi = 0.5 * params.gamma + 2.0 * x / static_cast<double>(n_gamma);
    gap = 0.5 * (lo + hi);

    const Count horizon = cfg.budget_queries();
    std::vector<double> prefix;
    for (Count i = 1; i <= m; ++i) prefix.push_back(c * static_cast<double>(i));
    const MismatchEnvelope biased(MismatchEnvelope::TabulatedPrefix{prefix}, horizon);
    const MismatchEnvelope exact(MismatchEnvelope::Constant{0.0}, horizon);

    const double mu1 = mu_best - gap;
    const double cc = c;
    const Count mm = m;
    std::vector<ArmSpec> arms{
        ArmSpec{mu_best, 1, exact, [mu = mu_best](Count) { return mu; }},
        ArmSpec{mu1, 1, biased, [mu1, cc, mm](Count tau) { return tau <= mm ? mu1 + cc : mu1; }},
    };
    return BanditInstance(std::move(arms), costs, GaussianNoise{sigma}, false);
  }
};

}  // namespace mfb::testing
