#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mfb/confidence.hpp"
#include "support.hpp"

using namespace mfb;
using doctest::Approx;

namespace {

// 2KT/delta = e with K = 1, T = 1  =>  delta = 2/e.
ConfidenceConfig unit_log() { return ConfidenceConfig(1.0, 2.0 / std::exp(1.0), 1, 1); }

FidelityStats stats_with_mean(double mean, Count n) {
  FidelityStats s;
  for (Count i = 0; i < n; ++i) s.add(mean);
  return s;
}

}  // namespace

TEST_CASE("radius") {
  const ConfidenceConfig u = unit_log();
  CHECK(u.log_factor() == Approx(1.0).epsilon(1e-14));
  CHECK(radius(u, 1) == Approx(1.0).epsilon(1e-14));
  CHECK(radius(u, 4) == Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(radius(u, 0), std::domain_error);

  // sqrt(2 ln(8e7) / 100).
  const ConfidenceConfig big(2.0, 0.05, 200, 10000);
  CHECK(radius(big, 100) == Approx(0.6032833031).epsilon(1e-9));

  for (Count n = 1; n < 1000; n += 37) {
    CHECK(radius(big, n) * std::sqrt(static_cast<double>(n)) == Approx(std::sqrt(big.log_factor())).epsilon(1e-13));
  }
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(ConfidenceConfig(0.0, 0.05, 2, 10), ConfigError);
  CHECK_THROWS_AS(ConfidenceConfig(2.0, 0.0, 2, 10), ConfigError);
  CHECK_THROWS_AS(ConfidenceConfig(2.0, 1.0, 2, 10), ConfigError);
  CHECK_THROWS_AS(ConfidenceConfig(2.0, 0.05, 0, 10), ConfigError);
  CHECK_THROWS_AS(ConfidenceConfig(2.0, 0.05, 2, 0), ConfigError);
  CHECK(query_horizon(100.0, 1.0) == 100);
  CHECK(query_horizon(100.5, 1.0) == 101);
  CHECK(query_horizon(10.0, 3.0) == 4);
}

TEST_CASE("interval arithmetic") {
  // Pick l so that G(1) = 0.1.
  const ConfidenceConfig cfg(0.01, 2.0 / std::exp(1.0), 1, 1);
  const FidelityStats s = stats_with_mean(0.5, 1);
  const MismatchEnvelope env(MismatchEnvelope::Constant{0.05}, 10);

  const Interval lo = low_bounds(cfg, s, env);
  CHECK(lo.lcb == Approx(0.35));
  CHECK(lo.ucb == Approx(0.65));

  const Interval hi = high_bounds(cfg, s);
  CHECK(hi.lcb == Approx(0.4));
  CHECK(hi.ucb == Approx(0.6));
  CHECK(hi.width() == Approx(2.0 * radius(cfg, 1)));

  const MismatchEnvelope zero(MismatchEnvelope::Constant{0.0}, 10);
  const Interval z = low_bounds(cfg, s, zero);
  CHECK(z.lcb == hi.lcb);
  CHECK(z.ucb == hi.ucb);

  CHECK(aggregate_ucb(0.65, 0.60) == 0.60);
  CHECK(aggregate_ucb(0.60, 0.60) == 0.60);
}

TEST_CASE("low intervals nest outside high intervals at equal counts") {
  const ConfidenceConfig cfg(2.0, 0.05, 3, 500);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 300; ++t) {
    const MismatchEnvelope env(testing::random_kind(rng), 500);
    const Count n = 1 + rng() % 500;
    const FidelityStats s = stats_with_mean(0.3, n);
    CHECK(low_bounds(cfg, s, env).width() >= high_bounds(cfg, s).width());
  }
  // Width vanishes as n grows.
  const ConfidenceConfig wide(2.0, 0.05, 3, 1u << 30);
  CHECK(high_bounds(wide, stats_with_mean(0.0, 1u << 30)).width() < 0.01);
}

TEST_CASE("low interval covers the target on the concentration event") {
  // Replay random power-law trajectories and check the triangle-inequality
  // argument: |mean - selected average| <= G implies mu_high is covered.
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0.0, 1.0);
  const ConfidenceConfig cfg(2.0, 0.05, 1, 400);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const double mu = 0.5;
    const int sign = t % 2 ? 1 : -1;
    const ArmSpec arm = power_law_arm(mu, sign, 0.3, 0.6, 400);
    FidelityStats s;
    double avg_sum = 0.0;
    for (Count n = 1; n <= 400; ++n) {
      const double m = arm.trajectory(n);
      avg_sum += m;
      s.add(m + 0.3 * noise(rng));
      const double selected = avg_sum / static_cast<double>(n);
      if (std::fabs(s.mean() - selected) <= radius(cfg, n)) {
        ++checked;
        CHECK(low_bounds(cfg, s, arm.envelope).contains(mu));
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("n_gamma") {
  const ConfidenceConfig u = unit_log();
  CHECK(n_gamma(u, 1.0) == 2);
  CHECK(n_gamma(u, 2.0) == 1);

  const ConfidenceConfig big(2.0, 0.05, 200, 10000);
  CHECK(n_gamma(big, 0.063) == testing::ref_n_gamma(big.log_factor(), 0.063));
  CHECK(radius(big, n_gamma(big, 0.063)) < 0.063);
  CHECK(radius(big, n_gamma(big, 0.063) - 1) >= 0.063);
}

TEST_CASE("n_gamma agrees with the predicate scan on random inputs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double rho = 0.05 + 4.0 * u(rng);
    const double delta = 0.001 + 0.9 * u(rng);
    const std::size_t k = 1 + rng() % 50;
    const Count t = 1 + rng() % 200000;
    const double gamma = 0.03 + 2.0 * u(rng);
    const ConfidenceConfig cfg(rho, delta, k, t);
    CHECK(n_gamma(cfg, gamma) == testing::ref_n_gamma(testing::ref_log_factor(rho, delta, k, t), gamma));
  }
  CHECK_THROWS_AS(n_gamma(unit_log(), 0.0), std::domain_error);
}
