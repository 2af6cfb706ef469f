#pragma once

#include <array>

#include "drivepg/random.hpp"
#include "drivepg/types.hpp"

namespace drivepg::ddpg {

/// Per-dimension Ornstein-Uhlenbeck parameters, ordered like Action.
struct OuParameters {
  std::array<double, kActionSize> theta{0.6, 0.6, 1.0};
  std::array<double, kActionSize> mu{0.5, -0.1, 0.0};
  std::array<double, kActionSize> sigma{0.10, 0.05, 0.30};
  double dt = 1.0;
  friend bool operator==(const OuParameters&, const OuParameters&) = default;
};

/// Temporally correlated exploration noise:
///   x <- x + theta (mu - x) dt + sigma sqrt(dt) N(0, 1)
class OuNoise {
 public:
  explicit OuNoise(OuParameters params = {});

  /// Advances every dimension once and returns the new values.
  std::array<double, kActionSize> sample(Rng& rng);

  /// Puts the process back at its long-run mean.
  void reset();

  const OuParameters& parameters() const { return params_; }
  const std::array<double, kActionSize>& state() const { return x_; }
  void set_state(const std::array<double, kActionSize>& x) { x_ = x; }

 private:
  OuParameters params_;
  std::array<double, kActionSize> x_;
};

}  // namespace drivepg::ddpg
