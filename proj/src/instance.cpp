#include "mfb/instance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfb {

ArmSpec power_law_arm(double mu_high, int sign, double zeta, double r, Count horizon) {
  return power_law_arm_shared(mu_high, sign, zeta, r,
                              MismatchEnvelope(MismatchEnvelope::PowerLaw{zeta, r}, horizon));
}

ArmSpec power_law_arm_shared(double mu_high, int sign, double zeta, double r, const MismatchEnvelope& envelope) {
  const double scale = sign * zeta;
  return ArmSpec{mu_high, sign, envelope,
                 [mu_high, scale, r](Count tau) { return mu_high + scale * std::pow(static_cast<double>(tau), -r); }};
}

ArmSpec constant_bias_arm(double mu_high, int sign, double zeta, Count horizon) {
  const double offset = sign * zeta;
  return ArmSpec{mu_high, sign, MismatchEnvelope(MismatchEnvelope::Constant{zeta}, horizon),
                 [mu_high, offset](Count) { return mu_high + offset; }};
}

ArmSpec residual_arm(double mu_high, double b, double a, Count n0, double r, Count horizon) {
  return residual_arm_shared(mu_high, b, a, n0, r, MismatchEnvelope(MismatchEnvelope::Residual{b, a, n0, r}, horizon));
}

ArmSpec residual_arm_shared(double mu_high, double b, double a, Count n0, double r, const MismatchEnvelope& envelope) {
  return ArmSpec{mu_high, a < 0.0 ? -1 : 1, envelope, [mu_high, b, a, n0, r](Count tau) {
                   return mu_high + b + a * std::pow(static_cast<double>(tau + n0), -r);
                 }};
}

BanditInstance::BanditInstance(std::vector<ArmSpec> arms, CostModel costs, NoiseModel noise, bool clip_means)
    : arms_(std::move(arms)), costs_(costs), noise_(noise), clip_(clip_means) {
  if (arms_.empty()) throw ConfigError("a bandit instance needs at least one arm");
  if (const auto* g = std::get_if<GaussianNoise>(&noise_); g && !(g->sigma >= 0.0)) {
    throw ConfigError("gaussian noise needs sigma >= 0");
  }
  if (std::holds_alternative<BernoulliNoise>(noise_)) {
    if (!clip_) throw ConfigError("bernoulli rewards require clipped means");
    for (const auto& a : arms_) {
      if (a.mu_high < 0.0 || a.mu_high > 1.0) throw ConfigError("bernoulli arms need mu_high in [0, 1]");
    }
  }
  for (const auto& a : arms_) {
    if (!a.trajectory) throw ConfigError("every arm needs a low-fidelity trajectory");
  }
  for (Index k = 1; k < arms_.size(); ++k) {
    if (arms_[k].mu_high > arms_[best_].mu_high) best_ = k;
  }
}

const ArmSpec& BanditInstance::arm(Index k) const {
  if (k >= arms_.size()) throw std::domain_error("arm index " + std::to_string(k) + " out of range");
  return arms_[k];
}

std::vector<MismatchEnvelope> BanditInstance::envelopes() const {
  std::vector<MismatchEnvelope> out;
  out.reserve(arms_.size());
  for (const auto& a : arms_) out.push_back(a.envelope);
  return out;
}

double instantaneous_low_mean(const ArmSpec& arm, Count tau, bool clip) {
  const double m = arm.trajectory(tau);
  return clip ? std::clamp(m, 0.0, 1.0) : m;
}

double sample_observation(const BanditInstance& instance, Index arm_index, Fidelity fidelity,
                          Count low_count_so_far, Rng& rng) {
  const ArmSpec& arm = instance.arm(arm_index);
  double mean = fidelity == Fidelity::High ? arm.mu_high
                                           : instantaneous_low_mean(arm, low_count_so_far + 1, instance.clip_means());
  if (fidelity == Fidelity::High && instance.clip_means()) mean = std::clamp(mean, 0.0, 1.0);
  if (const auto* g = std::get_if<GaussianNoise>(&instance.noise())) {
    std::normal_distribution<double> normal(0.0, 1.0);
    return mean + g->sigma * normal(rng);
  }
  std::bernoulli_distribution coin(mean);
  return coin(rng) ? 1.0 : 0.0;
}

SyntheticSpec synthetic_preset(SyntheticPreset preset, double decay_r) {
  SyntheticSpec spec;
  spec.r = decay_r;
  if (preset == SyntheticPreset::SetA) {
    spec.num_arms = 200;
    spec.means = SyntheticSpec::Means::Uniform;
    spec.mean_a = 0.1;
    spec.mean_b = 0.9;
    spec.zeta = 0.2;
    spec.costs = CostModel(1.0, 10.0);
  } else {
    spec.num_arms = 500;
    spec.means = SyntheticSpec::Means::Normal;
    spec.mean_a = 0.0;
    spec.mean_b = 1.0;
    spec.zeta = 1.0;
    spec.costs = CostModel(1.0, 50.0);
  }
  return spec;
}

BanditInstance make_synthetic_instance(const SyntheticSpec& spec, Count horizon, Rng& rng) {
  if (!(spec.r > 0.0)) throw ConfigError("decay rate r must be > 0");
  std::size_t k = spec.num_arms;
  if (spec.means == SyntheticSpec::Means::Fixed) {
    if (spec.fixed_means.empty()) throw ConfigError("fixed means requested but env.means.values is empty");
    k = spec.fixed_means.size();
  }
  if (k == 0) throw ConfigError("env.arms must be >= 1");

  // All arms share one certificate; the sign only enters the trajectory.
  const MismatchEnvelope envelope =
      spec.shape == SyntheticSpec::Shape::PowerLaw
          ? MismatchEnvelope(MismatchEnvelope::PowerLaw{spec.zeta, spec.r}, horizon)
          : MismatchEnvelope(MismatchEnvelope::Constant{spec.zeta}, horizon);
  std::uniform_real_distribution<double> uniform(spec.mean_a, spec.mean_b);
  std::normal_distribution<double> normal(spec.mean_a, spec.mean_b);
  std::bernoulli_distribution coin(0.5);

  std::vector<ArmSpec> arms;
  arms.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    double mu = 0.0;
    switch (spec.means) {
      case SyntheticSpec::Means::Uniform: mu = uniform(rng); break;
      case SyntheticSpec::Means::Normal: mu = normal(rng); break;
      case SyntheticSpec::Means::Fixed: mu = spec.fixed_means[i]; break;
    }
    const int sign = coin(rng) ? 1 : -1;
    if (spec.shape == SyntheticSpec::Shape::PowerLaw) {
      arms.push_back(power_law_arm_shared(mu, sign, spec.zeta, spec.r, envelope));
    } else {
      const double offset = sign * spec.zeta;
      arms.push_back(ArmSpec{mu, sign, envelope, [mu, offset](Count) { return mu + offset; }});
    }
  }
  return BanditInstance(std::move(arms), spec.costs, GaussianNoise{spec.sigma}, false);
}

BanditInstance make_synthetic_set(SyntheticPreset preset, double decay_r, Count horizon, Rng& rng,
                                  std::size_t num_arms, double high_cost) {
  SyntheticSpec spec = synthetic_preset(preset, decay_r);
  if (num_arms) spec.num_arms = num_arms;
  if (high_cost > 0.0) spec.costs = CostModel(spec.costs.low(), high_cost);
  return make_synthetic_instance(spec, horizon, rng);
}

BanditInstance make_proxy_judge_instance(ProxyRegime regime, const ProxyParams& params, Count horizon, Rng& rng) {
  std::vector<double> means;
  double b = params.b;
  switch (regime) {
    case ProxyRegime::Residual:
      if (!(b > 0.0)) throw ConfigError("residual regime requires b > 0");
      [[fallthrough]];
    case ProxyRegime::Vanishing:
      if (regime == ProxyRegime::Vanishing) b = 0.0;
      if (!params.means.empty()) {
        means = params.means;
      } else if (params.accept_default_means) {
        means = default_proxy_means();
      } else {
        throw ConfigError("env.means is required for the 4-arm proxy regimes");
      }
      break;
    case ProxyRegime::Checkpoint5Arm:
      means = checkpoint_five_arm_means();
      break;
  }

  const MismatchEnvelope up(MismatchEnvelope::Residual{b, params.zeta, params.n0, params.r}, horizon);
  const MismatchEnvelope down(MismatchEnvelope::Residual{b, -params.zeta, params.n0, params.r}, horizon);
  std::bernoulli_distribution coin(0.5);
  std::vector<ArmSpec> arms;
  arms.reserve(means.size());
  for (double mu : means) {
    const int sign = coin(rng) ? 1 : -1;
    const double a = sign * params.zeta;
    arms.push_back(residual_arm_shared(mu, b, a, params.n0, params.r, sign > 0 ? up : down));
    arms.back().bias_sign = sign;
  }
  return BanditInstance(std::move(arms), CostModel(1.0, params.high_cost), BernoulliNoise{}, true);
}

}  // namespace mfb
