#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mfb/diagnostics.hpp"
#include "mfb/episode.hpp"
#include "mfb/experiment.hpp"
#include "mfb/config.hpp"
#include "mfb/policies.hpp"
#include "support.hpp"

using namespace mfb;
using doctest::Approx;

namespace {

ArmState arm_state(double low_mean, Count n_low, double high_mean, Count n_high, Count cont = 0) {
  ArmState s;
  for (Count i = 0; i < n_low; ++i) s.low.add(low_mean);
  for (Count i = 0; i < n_high; ++i) s.high.add(high_mean);
  s.continuation = cont;
  return s;
}

BanditInstance two_arm(double mu0, double mu1, double sigma, const MismatchEnvelope& env, CostModel costs) {
  std::vector<ArmSpec> arms{ArmSpec{mu0, 1, env, [mu0](Count) { return mu0; }},
                            ArmSpec{mu1, 1, env, [mu1](Count) { return mu1; }}};
  return BanditInstance(std::move(arms), costs, GaussianNoise{sigma}, false);
}

/// Runs one policy and, before every query, replays the published decision
/// functions on the same state.
template <class Check>
void run_checked(Episode& ep, Policy& policy, Check&& check) {
  ep.warm_start();
  for (;;) {
    const PolicyState before = ep.state();
    const auto a = policy.decide(before);
    if (!a || !ep.affordable(a->fidelity)) break;
    check(before, *a);
    ep.pull(a->arm, a->fidelity, a->reason);
  }
}

}  // namespace

TEST_CASE("continuation gain") {
  const MismatchEnvelope c(MismatchEnvelope::Constant{0.3}, 100);
  for (Count s = 1; s < 50; ++s) CHECK(continuation_gain(c, 10, s) == 0.0);

  const MismatchEnvelope p(MismatchEnvelope::PowerLaw{0.2, 0.5}, 100);
  CHECK(continuation_gain(p, 1, 1) == Approx(0.2 - 0.1707106781).epsilon(1e-9));
  CHECK(continuation_gain(p, 1, 1) == Approx(testing::ref_B(p.kind(), 1, 100) - testing::ref_B(p.kind(), 2, 100)));

  double prev = 0.0;
  for (Count s = 1; s < 60; ++s) {
    const double v = continuation_gain(p, 20, s);
    CHECK(v >= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  bool clamped = false;
  continuation_gain(p, 90, 20, &clamped);
  CHECK(clamped);
}

TEST_CASE("parameter validation cites the continuation cost constraint") {
  TaccParams p{0.1, 1e-4, 11, 1000.0};
  try {
    p.validate(CostModel(1.0, 10.0));
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("continuation cost constraint") != std::string::npos);
  }
  p.s0 = 10;
  CHECK_NOTHROW(p.validate(CostModel(1.0, 10.0)));
  p.eta = 1.0;
  CHECK_THROWS_AS(p.validate(CostModel(1.0, 10.0)), ConfigError);
  p.eta = 1e-4;
  p.gamma = 0.0;
  CHECK_THROWS_AS(p.validate(CostModel(1.0, 10.0)), ConfigError);
}

TEST_CASE("arm selection") {
  const ConfidenceConfig cfg(2.0, 0.05, 2, 1000);
  const std::vector<MismatchEnvelope> env(2, MismatchEnvelope(MismatchEnvelope::Constant{0.0}, 1000));
  PolicyState s;
  const double g = radius(cfg, 1);
  s.arms = {arm_state(0.9 - g, 1, 0.9 - g, 1), arm_state(0.7 - g, 1, 0.7 - g, 1)};
  CHECK(tacc_select_arm(s, cfg, env) == 0);
  std::swap(s.arms[0], s.arms[1]);
  CHECK(tacc_select_arm(s, cfg, env) == 1);

  s.arms = {arm_state(0.5, 3, 0.5, 1), arm_state(0.5, 3, 0.5, 1)};
  CHECK(tacc_select_arm(s, cfg, env) == 0);

  // A common shift of every observation leaves the choice unchanged.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    PolicyState a, b;
    const double shift = 5.0 * u(rng) - 2.5;
    for (int k = 0; k < 5; ++k) {
      const Count nl = 1 + rng() % 40, nh = 1 + rng() % 5;
      const double ml = u(rng), mh = u(rng);
      a.arms.push_back(arm_state(ml, nl, mh, nh));
      b.arms.push_back(arm_state(ml + shift, nl, mh + shift, nh));
    }
    const std::vector<MismatchEnvelope> e5(5, MismatchEnvelope(MismatchEnvelope::PowerLaw{0.3, 0.5}, 1000));
    CHECK(tacc_select_arm(a, cfg, e5) == tacc_select_arm(b, cfg, e5));
  }
}

TEST_CASE("fidelity rule") {
  const ConfidenceConfig cfg(2.0, 0.05, 1, 1000);
  const MismatchEnvelope flat(MismatchEnvelope::Constant{0.1}, 1000);
  const MismatchEnvelope decay(MismatchEnvelope::PowerLaw{0.5, 0.5}, 1000);
  PolicyState s;
  s.arms = {arm_state(0.5, 40, 0.5, 1)};
  TaccParams p{radius(cfg, 40), 1e-4, 10, 1000.0};

  SUBCASE("radius exactly gamma stays low") {
    const Action a = tacc_select_fidelity(s, 0, p, cfg, decay);
    CHECK(a.fidelity == Fidelity::Low);
    CHECK(a.reason == ActionReason::PreThresholdLow);
  }
  p.gamma = radius(cfg, 40) * 1.01;
  SUBCASE("continuation cap exhausted") {
    s.arms[0].continuation = p.s0;
    const Action a = tacc_select_fidelity(s, 0, p, cfg, decay);
    CHECK(a.fidelity == Fidelity::High);
    CHECK(a.reason == ActionReason::Escalate);
  }
  SUBCASE("constant envelope escalates") {
    CHECK(tacc_select_fidelity(s, 0, p, cfg, flat).reason == ActionReason::Escalate);
  }
  SUBCASE("two-level envelope with a drop of 3 eta gamma continues") {
    // U jumps once so that B(40) - B(50) = 3 eta gamma exactly.
    const double drop = 3.0 * p.eta * p.gamma;
    const double x = drop / (1.0 / 40.0 - 1.0 / 50.0);
    std::vector<double> prefix(20, x);
    const MismatchEnvelope two(MismatchEnvelope::TabulatedPrefix{prefix}, 1000);
    CHECK(continuation_gain(two, 40, 10) == Approx(drop));
    const Action a = tacc_select_fidelity(s, 0, p, cfg, two);
    CHECK(a.fidelity == Fidelity::Low);
    CHECK(a.reason == ActionReason::ContinuationLow);
    // A drop below 2 eta gamma does not.
    std::vector<double> small(20, x / 2.0);
    CHECK(tacc_select_fidelity(s, 0, p, cfg, MismatchEnvelope(MismatchEnvelope::TabulatedPrefix{small}, 1000)).reason ==
          ActionReason::Escalate);
  }
}

TEST_CASE("pre-query budget check") {
  const MismatchEnvelope zero(MismatchEnvelope::Constant{0.0}, 100);
  const BanditInstance inst = two_arm(0.5, 0.4, 1.0, zero, CostModel(1.0, 10.0));
  const ConfidenceConfig cfg(2.0, 0.05, 2, 100);

  SUBCASE("less than a low query left halts") {
    Episode ep(inst, cfg, 22.5, 0);
    ep.warm_start();
    TaccPolicy pol(cfg, inst.envelopes(), TaccParams{0.01, 1e-4, 5, 22.5});
    CHECK(step(ep, pol) == StepStatus::Halted);
    CHECK(ep.state().cost == 22.0);
  }
  SUBCASE("a high query that does not fit halts even if a low one would") {
    Episode ep(inst, cfg, 25.0, 0);
    ep.warm_start();
    TaccPolicy dnc(cfg, inst.envelopes(), TaccParams{100.0, 1e-4, 5, 25.0}, false);
    const auto a = dnc.decide(ep.state());
    REQUIRE(a);
    CHECK(a->fidelity == Fidelity::High);
    CHECK(step(ep, dnc) == StepStatus::Halted);
    CHECK(ep.state().cost == 22.0);
  }
  SUBCASE("warm start must be affordable") {
    Episode ep(inst, cfg, 21.0, 0);
    CHECK_THROWS_AS(ep.warm_start(), ConfigError);
  }
}

TEST_CASE("a low-certifiable arm is dropped once its radius crosses gamma") {
  // sigma = 0, no mismatch: the suboptimal arm's effective low gap is its full
  // gap from the first query on.
  const Count horizon = 4000;
  const MismatchEnvelope zero(MismatchEnvelope::Constant{0.0}, horizon);
  const BanditInstance inst = two_arm(1.0, 0.0, 0.0, zero, CostModel(1.0, 10.0));
  const ConfidenceConfig cfg(0.05, 0.05, 2, horizon);
  const TaccParams p{0.4, 1e-4, 5, 4000.0};
  REQUIRE(1.0 >= 2.0 * p.gamma);
  const Count ng = n_gamma(cfg, p.gamma);

  Episode ep(inst, cfg, 4000.0, 0);
  TaccPolicy pol(cfg, inst.envelopes(), p);
  run_to_budget(ep, pol);
  CHECK(ep.state().arms[0].low.count() >= ng);  // the optimal arm did cross
  for (const auto& rec : ep.log()) {
    if (rec.arm == 1 && rec.reason != ActionReason::Initialization) CHECK(rec.low_count_before < ng);
  }
}

TEST_CASE("DNC fidelity rule") {
  const ConfidenceConfig cfg(2.0, 0.05, 1, 1000);
  const std::vector<MismatchEnvelope> env{MismatchEnvelope(MismatchEnvelope::PowerLaw{0.5, 0.5}, 1000)};
  PolicyState s;
  s.arms = {arm_state(0.5, 40, 0.5, 1)};
  TaccPolicy below(cfg, env, TaccParams{radius(cfg, 40) * 1.01, 1e-4, 10, 1000.0}, false);
  CHECK(below.decide(s)->fidelity == Fidelity::High);
  TaccPolicy above(cfg, env, TaccParams{radius(cfg, 40), 1e-4, 10, 1000.0}, false);
  CHECK(above.decide(s)->fidelity == Fidelity::Low);
}

TEST_CASE("TACC run invariants and rule replay") {
  ExperimentConfig c = preset_config("set-a");
  c.synthetic.num_arms = 10;
  c.budget = 30000.0;
  c.checkpoints = {c.budget};
  c.rho = 0.05;  // small enough that arms cross the threshold within budget
  const ConfidenceConfig cfg = c.confidence();
  TaccParams p = c.tacc;
  p.budget = c.budget;
  const Count ng = n_gamma(cfg, p.gamma);

  Count continuation_seen = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const BanditInstance inst = build_instance(c, seed);
    const auto envs = inst.envelopes();
    Episode ep(inst, cfg, c.budget, seed);
    TaccPolicy pol(cfg, envs, p);
    run_checked(ep, pol, [&](const PolicyState& st, const Action& a) {
      const Index arm = tacc_select_arm(st, cfg, envs);
      CHECK(a.arm == arm);
      CHECK(a == tacc_select_fidelity(st, arm, p, cfg, envs[arm]));
    });

    const auto& st = ep.state();
    CHECK(st.cost <= c.budget);
    Count lo = 0, hi = 0, cont = 0;
    for (Index k = 0; k < st.arms.size(); ++k) {
      lo += st.arms[k].low.count();
      hi += st.arms[k].high.count();
      cont += st.arms[k].continuation;
      CHECK(st.arms[k].continuation <= p.s0);
      CHECK(static_cast<double>(st.arms[k].continuation) * inst.costs().low() <= inst.costs().high());
      CHECK(st.arms[k].low.count() <= ng + p.s0 + 1);
    }
    CHECK(lo * inst.costs().low() + hi * inst.costs().high() == Approx(st.cost));
    CHECK(cont == ep.continuation_calls());
    continuation_seen += cont;
    CHECK(replay_regret(inst, ep.log()) == Approx(ep.regret()).epsilon(1e-9));
    if (ep.coverage_held()) CHECK(count_selection_certificate_failures(inst, cfg, ep.log()) == 0);

    // A_k moves only on continuation pulls.
    std::vector<Count> a(inst.num_arms(), 0);
    for (const auto& rec : ep.log()) a[rec.arm] += rec.reason == ActionReason::ContinuationLow;
    for (Index k = 0; k < a.size(); ++k) CHECK(a[k] == st.arms[k].continuation);
  }
  CHECK(continuation_seen > 0);
}

TEST_CASE("TACC and DNC coincide under constant envelopes") {
  ExperimentConfig c = preset_config("set-a");
  c.synthetic.num_arms = 8;
  c.synthetic.shape = SyntheticSpec::Shape::Constant;
  c.rho = 0.05;
  c.budget = 20000.0;
  c.checkpoints = {c.budget};
  c.keep_logs = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BanditInstance inst = build_instance(c, seed);
    const RunRecord t = run_method(c, inst, "TACC", seed);
    const RunRecord d = run_method(c, inst, "DNC", seed);
    REQUIRE(t.log.size() == d.log.size());
    for (std::size_t i = 0; i < t.log.size(); ++i) {
      CHECK(t.log[i].arm == d.log[i].arm);
      CHECK(t.log[i].fidelity == d.log[i].fidelity);
    }
  }
}

TEST_CASE("MF-UCB") {
  const Count horizon = 5000;
  const MismatchEnvelope env(MismatchEnvelope::PowerLaw{0.2, 0.5}, horizon);
  std::vector<ArmSpec> arms{power_law_arm_shared(0.8, 1, 0.2, 0.5, env), power_law_arm_shared(0.5, -1, 0.2, 0.5, env),
                            power_law_arm_shared(0.3, 1, 0.2, 0.5, env)};
  const BanditInstance inst(std::move(arms), CostModel(1.0, 10.0), GaussianNoise{1.0}, false);
  const ConfidenceConfig cfg(2.0, 0.05, 3, horizon);
  const auto bias = default_fixed_bias(inst.envelopes());
  CHECK(bias == std::vector<double>(3, 0.2));

  SUBCASE("a vanishing threshold never escalates") {
    MfUcbPolicy pol(cfg, std::vector<double>(3, 0.0), 1e-300);
    Episode ep(inst, cfg, 5000.0, 1);
    run_to_budget(ep, pol);
    CHECK(ep.high_calls() == 3);  // warm start only
  }
  SUBCASE("escalation follows the radius threshold") {
    const double gamma = 0.5;
    MfUcbPolicy pol(cfg, bias, gamma);
    Episode ep(inst, cfg, 5000.0, 1);
    run_checked(ep, pol, [&](const PolicyState& st, const Action& a) {
      const bool low = radius(cfg, st.arms[a.arm].low.count()) >= gamma;
      CHECK((a.fidelity == Fidelity::Low) == low);
    });
    CHECK(ep.high_calls() > 3);
  }
}

TEST_CASE("high-fidelity UCB") {
  const Count horizon = 20000;
  const MismatchEnvelope env(MismatchEnvelope::PowerLaw{0.2, 0.5}, horizon);
  SUBCASE("no low queries after warm start; pull caps on covered runs") {
    std::vector<ArmSpec> arms{power_law_arm_shared(0.9, 1, 0.2, 0.5, env),
                              power_law_arm_shared(0.2, 1, 0.2, 0.5, env),
                              power_law_arm_shared(-0.5, 1, 0.2, 0.5, env)};
    const BanditInstance inst(std::move(arms), CostModel(1.0, 10.0), GaussianNoise{1.0}, false);
    const ConfidenceConfig cfg(2.0, 0.05, 3, horizon);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      UcbHighPolicy pol(cfg);
      Episode ep(inst, cfg, 20000.0, seed);
      run_to_budget(ep, pol);
      CHECK(ep.low_calls() == 3);
      for (const auto& rec : ep.log()) {
        if (rec.reason != ActionReason::Initialization) CHECK(rec.fidelity == Fidelity::High);
      }
      if (!ep.coverage_held()) continue;
      for (Index k = 1; k < 3; ++k) CHECK(ep.state().arms[k].high.count() <= high_pull_cap(cfg, inst.gap(k)));
    }
  }
  SUBCASE("single arm") {
    const BanditInstance one({power_law_arm_shared(0.4, 1, 0.2, 0.5, env)}, CostModel(1.0, 10.0),
                             GaussianNoise{1.0}, false);
    const ConfidenceConfig cfg(2.0, 0.05, 1, horizon);
    UcbHighPolicy pol(cfg);
    Episode ep(one, cfg, 1001.0, 0);
    run_to_budget(ep, pol);
    CHECK(ep.regret() == 0.0);
    CHECK(ep.state().cost == 1001.0);
    CHECK(ep.high_calls() == 100);
  }
}

TEST_CASE("static elimination") {
  SUBCASE("finishes after separating two arms") {
    const Count horizon = 1000;
    const MismatchEnvelope zero(MismatchEnvelope::Constant{0.0}, horizon);
    const BanditInstance inst = two_arm(100.0, 0.0, 0.0, zero, CostModel(1.0, 10.0));
    const ConfidenceConfig cfg(2.0, 0.05, 2, horizon);
    StaticEliminationPolicy pol(cfg, {0.0, 0.0}, 0.1);
    Episode ep(inst, cfg, 1000.0, 0);
    ep.warm_start();
    CHECK(step(ep, pol) == StepStatus::Finished);
    CHECK(pol.active() == std::vector<Index>{0});
    CHECK(pol.eliminated() == std::vector<Index>{1});
  }
  SUBCASE("eliminated arms are never sampled again and the best arm survives") {
    ExperimentConfig c = preset_config("set-a");
    c.synthetic.num_arms = 20;
    c.budget = 20000.0;
    c.checkpoints = {c.budget};
    const ConfidenceConfig cfg = c.confidence();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const BanditInstance inst = build_instance(c, seed);
      StaticEliminationPolicy pol(cfg, default_fixed_bias(inst.envelopes()), c.tacc.gamma);
      Episode ep(inst, cfg, c.budget, seed);
      ep.warm_start();
      std::vector<bool> gone(inst.num_arms(), false);
      for (;;) {
        const auto a = pol.decide(ep.state());
        for (Index k : pol.eliminated()) gone[k] = true;
        if (!a || !ep.affordable(a->fidelity)) break;
        CHECK_FALSE(gone[a->arm]);
        ep.pull(a->arm, a->fidelity, a->reason);
      }
      if (ep.coverage_held()) CHECK_FALSE(gone[inst.best_arm()]);
    }
  }
}
