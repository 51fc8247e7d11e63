#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mfb {

using Count = std::uint64_t;
using Index = std::size_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Fidelity : std::uint8_t { Low = 0, High = 1 };

inline std::string_view to_string(Fidelity f) { return f == Fidelity::Low ? "L" : "H"; }

/// Raised for malformed or inconsistent experiment/instance configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-query costs of the two fidelities. Invariant: 0 < low < high.
class CostModel {
 public:
  CostModel(double low, double high) : low_(low), high_(high) {
    if (!(low > 0.0) || !(high > low)) {
      throw ConfigError("costs must satisfy 0 < costs.low < costs.high");
    }
  }

  double low() const { return low_; }
  double high() const { return high_; }
  double of(Fidelity f) const { return f == Fidelity::Low ? low_ : high_; }

  bool operator==(const CostModel&) const = default;

 private:
  double low_;
  double high_;
};

}  // namespace mfb
