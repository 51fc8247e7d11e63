#include "mfb/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfb {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::vector<double> build_cumulative(const MismatchEnvelope::Kind& kind, Count horizon) {
  std::vector<double> u(horizon + 1, 0.0);
  std::visit(
      Overloaded{
          [&](const MismatchEnvelope::PowerLaw& p) {
            if (!(p.zeta >= 0.0) || !(p.r > 0.0)) throw ConfigError("power-law envelope needs zeta >= 0, r > 0");
            for (Count n = 1; n <= horizon; ++n) {
              u[n] = u[n - 1] + p.zeta * std::pow(static_cast<double>(n), -p.r);
            }
          },
          [&](const MismatchEnvelope::Residual& p) {
            if (!(p.r > 0.0)) throw ConfigError("residual envelope needs r > 0");
            for (Count n = 1; n <= horizon; ++n) {
              const double decay = std::pow(static_cast<double>(n + p.n0), -p.r);
              u[n] = u[n - 1] + std::fabs(p.b + p.a * decay);
            }
          },
          [&](const MismatchEnvelope::Constant& p) {
            if (!(p.zeta >= 0.0)) throw ConfigError("constant envelope needs zeta >= 0");
            for (Count n = 1; n <= horizon; ++n) u[n] = p.zeta * static_cast<double>(n);
          },
          [&](const MismatchEnvelope::TabulatedPrefix& p) {
            if (p.prefix_sums.empty()) throw ConfigError("tabulated envelope needs at least one prefix sum");
            double prev = 0.0;
            for (double v : p.prefix_sums) {
              if (!(v >= prev)) throw ConfigError("tabulated prefix sums must be nonnegative and nondecreasing");
              prev = v;
            }
            for (Count n = 1; n <= horizon; ++n) {
              u[n] = n <= p.prefix_sums.size() ? p.prefix_sums[n - 1] : p.prefix_sums.back();
            }
          },
      },
      kind);
  return u;
}

}  // namespace

MismatchEnvelope::MismatchEnvelope(Kind kind, Count horizon) : kind_(std::move(kind)), horizon_(horizon) {
  if (horizon_ == 0) throw ConfigError("envelope horizon must be >= 1");
  auto u = std::make_shared<std::vector<double>>(build_cumulative(kind_, horizon_));
  auto b = std::make_shared<std::vector<double>>(horizon_ + 1, 0.0);
  // Suffix maximum of U(s)/s.
  double running = 0.0;
  for (Count s = horizon_; s >= 1; --s) {
    running = std::max(running, (*u)[s] / static_cast<double>(s));
    (*b)[s] = running;
  }
  cumulative_ = std::move(u);
  bound_ = std::move(b);
}

double MismatchEnvelope::cumulative(Count n) const {
  if (n > horizon_) {
    throw std::domain_error("U(n) requested beyond horizon " + std::to_string(horizon_));
  }
  return (*cumulative_)[n];
}

double MismatchEnvelope::bound(Count n) const {
  if (n == 0 || n > horizon_) {
    throw std::domain_error("B(n) requires 1 <= n <= horizon, got n=" + std::to_string(n) +
                            " horizon=" + std::to_string(horizon_));
  }
  return (*bound_)[n];
}

double MismatchEnvelope::bound_clamped(Count n) const {
  if (n == 0) throw std::domain_error("B(n) requires n >= 1");
  return (*bound_)[n > horizon_ ? horizon_ : n];
}

bool MismatchEnvelope::average_is_nonincreasing() const {
  const auto& u = *cumulative_;
  for (Count n = 1; n < horizon_; ++n) {
    // U(n+1)/(n+1) <= U(n)/n, cross-multiplied with a relative slack for rounding.
    const double lhs = u[n + 1] * static_cast<double>(n);
    const double rhs = u[n] * static_cast<double>(n + 1);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-300) return false;
  }
  return true;
}

}  // namespace mfb
