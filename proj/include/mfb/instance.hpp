#pragma once

#include <functional>
#include <random>
#include <variant>
#include <vector>

#include "mfb/envelope.hpp"
#include "mfb/types.hpp"

namespace mfb {

/// Random engine used for every seeded stream in the project.
using Rng = std::mt19937_64;

/// One arm: a stationary high-fidelity target and a low-fidelity trajectory
/// indexed by the arm's own low-fidelity query count.
struct ArmSpec {
  double mu_high = 0.0;
  int bias_sign = 1;
  MismatchEnvelope envelope;
  /// mu_low(tau) for tau >= 1, before clipping.
  std::function<double(Count)> trajectory;
};

/// mu_high + sign * zeta * tau^(-r); exactly certified by PowerLaw{zeta, r}.
ArmSpec power_law_arm(double mu_high, int sign, double zeta, double r, Count horizon);
/// mu_high + sign * zeta; certified by Constant{zeta}.
ArmSpec constant_bias_arm(double mu_high, int sign, double zeta, Count horizon);
/// mu_high + b + a * (tau + n0)^(-r); certified by Residual{b, a, n0, r}.
ArmSpec residual_arm(double mu_high, double b, double a, Count n0, double r, Count horizon);

// Variants reusing an already-built envelope table (many arms, one certificate).
ArmSpec power_law_arm_shared(double mu_high, int sign, double zeta, double r, const MismatchEnvelope& envelope);
ArmSpec residual_arm_shared(double mu_high, double b, double a, Count n0, double r, const MismatchEnvelope& envelope);

struct GaussianNoise {
  double sigma = 1.0;
};
struct BernoulliNoise {};
using NoiseModel = std::variant<GaussianNoise, BernoulliNoise>;

class BanditInstance {
 public:
  BanditInstance(std::vector<ArmSpec> arms, CostModel costs, NoiseModel noise, bool clip_means);

  std::size_t num_arms() const { return arms_.size(); }
  const ArmSpec& arm(Index k) const;
  const std::vector<ArmSpec>& arms() const { return arms_; }
  const CostModel& costs() const { return costs_; }
  const NoiseModel& noise() const { return noise_; }
  bool clip_means() const { return clip_; }

  /// Lowest index among the arms with the largest mu_high.
  Index best_arm() const { return best_; }
  double mu_star() const { return arms_[best_].mu_high; }
  double gap(Index k) const { return mu_star() - arm(k).mu_high; }

  /// Envelopes only; this is everything a policy may learn about the arms.
  std::vector<MismatchEnvelope> envelopes() const;

 private:
  std::vector<ArmSpec> arms_;
  CostModel costs_;
  NoiseModel noise_;
  bool clip_;
  Index best_ = 0;
};

double instantaneous_low_mean(const ArmSpec& arm, Count tau, bool clip);

/// One noisy observation. For Low the trajectory is read at tau = low_count_so_far + 1.
double sample_observation(const BanditInstance& instance, Index arm_index, Fidelity fidelity,
                          Count low_count_so_far, Rng& rng);

/// Generator parameters for synthetic instances: target means drawn per arm,
/// then a bias sign s_k uniform on {-1, +1}; mu_low(tau) = mu + s_k zeta tau^(-r)
/// (PowerLaw) or mu + s_k zeta (Constant); Gaussian noise.
struct SyntheticSpec {
  enum class Means { Uniform, Normal, Fixed };
  enum class Shape { PowerLaw, Constant };

  std::size_t num_arms = 200;
  Means means = Means::Uniform;
  double mean_a = 0.1;  // uniform lower bound, or normal mean
  double mean_b = 0.9;  // uniform upper bound, or normal standard deviation
  std::vector<double> fixed_means;
  double zeta = 0.2;
  double r = 0.5;
  Shape shape = Shape::PowerLaw;
  double sigma = 1.0;
  CostModel costs{1.0, 10.0};
};

enum class SyntheticPreset { SetA, SetB };

/// Set A: 200 arms, U(0.1, 0.9) means, zeta 0.2, costs (1, 10).
/// Set B: 500 arms, N(0, 1) means, zeta 1, costs (1, 50).
SyntheticSpec synthetic_preset(SyntheticPreset preset, double decay_r);

BanditInstance make_synthetic_instance(const SyntheticSpec& spec, Count horizon, Rng& rng);

/// Preset generator. `num_arms` of 0 keeps the preset size and `high_cost`
/// of 0 keeps the preset cost.
BanditInstance make_synthetic_set(SyntheticPreset preset, double decay_r, Count horizon, Rng& rng,
                                  std::size_t num_arms = 0, double high_cost = 0.0);

enum class ProxyRegime { Residual, Vanishing, Checkpoint5Arm };

struct ProxyParams {
  double zeta = 0.4;
  double r = 0.75;
  double b = 0.05;
  Count n0 = 0;
  double high_cost = 500.0;
  /// Target means for the 4-arm regimes. Empty selects the built-in defaults.
  std::vector<double> means;
  bool accept_default_means = true;
};

inline const std::vector<double>& default_proxy_means() {
  static const std::vector<double> means{0.62, 0.55, 0.50, 0.42};
  return means;
}
inline const std::vector<double>& checkpoint_five_arm_means() {
  static const std::vector<double> means{0.5568, 0.5376, 0.5376, 0.5364, 0.5060};
  return means;
}

/// Bernoulli-reward, clipped instances following the residual proxy model.
/// a_k = s_k * zeta with s_k drawn uniformly from {-1, +1} using `rng`.
BanditInstance make_proxy_judge_instance(ProxyRegime regime, const ProxyParams& params, Count horizon,
                                         Rng& rng);

}  // namespace mfb
