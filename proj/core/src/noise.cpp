#include "drivepg/noise.hpp"

#include <cmath>

#include "drivepg/errors.hpp"

namespace drivepg::ddpg {

OuNoise::OuNoise(OuParameters params) : params_(params), x_(params.mu) {
  if (!(params.dt > 0.0)) throw ConfigurationError("OU dt must be positive");
  for (std::size_t i = 0; i < kActionSize; ++i)
    if (params.theta[i] < 0.0 || params.sigma[i] < 0.0)
      throw ConfigurationError("OU theta and sigma must be non-negative");
}

std::array<double, kActionSize> OuNoise::sample(Rng& rng) {
  const double sqrt_dt = std::sqrt(params_.dt);
  for (std::size_t i = 0; i < kActionSize; ++i) {
    const double n = standard_normal(rng);
    x_[i] += params_.theta[i] * (params_.mu[i] - x_[i]) * params_.dt + params_.sigma[i] * sqrt_dt * n;
  }
  return x_;
}

void OuNoise::reset() { x_ = params_.mu; }

}  // namespace drivepg::ddpg
