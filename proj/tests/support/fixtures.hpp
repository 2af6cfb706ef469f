#pragma once

// Small agents and random transitions shared by the learner tests.

#include <cmath>
#include <numbers>
#include <vector>

#include "drivepg/agent.hpp"
#include "drivepg/random.hpp"
#include "drivepg/types.hpp"

namespace drivepg::testing {

inline ddpg::AgentConfig tiny_agent_config() {
  ddpg::AgentConfig c;
  c.shape.actor_hidden = {8, 6};
  c.shape.critic_state_width = 7;
  c.shape.critic_merge_width = 6;
  c.shape.critic_hidden_width = 5;
  return c;
}

inline Observation random_observation(Rng& rng) {
  Observation o;
  o.angle = uniform_real(rng, -std::numbers::pi, std::numbers::pi);
  for (double& t : o.track) t = uniform_real(rng, 0.0, kRangeFinderMax);
  o.track_pos = uniform_real(rng, -1.0, 1.0);
  o.speed_x = uniform_real(rng, 0.0, 300.0);
  o.speed_y = uniform_real(rng, -20.0, 20.0);
  for (double& w : o.wheel_spin) w = uniform_real(rng, 0.0, 250.0);
  o.rpm = uniform_real(rng, 0.0, 1.0);
  return o;
}

inline Action random_action(Rng& rng) {
  return {uniform_real(rng, 0.0, 1.0), uniform_real(rng, 0.0, 1.0), uniform_real(rng, -1.0, 1.0)};
}

inline Experience random_experience(Rng& rng, bool terminal = false) {
  Experience e;
  e.state = random_observation(rng);
  e.action = random_action(rng);
  e.reward = uniform_real(rng, -2.0, 2.0);
  e.next_state = random_observation(rng);
  e.terminal = terminal;
  return e;
}

inline std::vector<Experience> random_batch_of(Rng& rng, std::size_t n) {
  std::vector<Experience> b;
  for (std::size_t i = 0; i < n; ++i) b.push_back(random_experience(rng, i % 5 == 4));
  return b;
}

inline void zero_network(nn::Mlp& net) {
  for (auto& l : net.layers) {
    l.weights.setZero();
    l.biases.setZero();
  }
}

/// Critic evaluated with plain loops over the stored weights.
inline double reference_q(const ddpg::Critic& c, const Observation& obs, const Action& a,
                          std::vector<double>* last_hidden = nullptr) {
  const nn::Vector f = ddpg::observation_features(obs);
  auto dense = [](const nn::DenseLayer& l, const std::vector<double>& x, bool relu) {
    std::vector<double> y(static_cast<std::size_t>(l.weights.rows()));
    for (Eigen::Index i = 0; i < l.weights.rows(); ++i) {
      double s = l.biases[i];
      for (Eigen::Index j = 0; j < l.weights.cols(); ++j) s += l.weights(i, j) * x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = relu ? std::max(0.0, s) : s;
    }
    return y;
  };
  std::vector<double> x(f.data(), f.data() + f.size());
  std::vector<double> h1 = dense(c.state_path.layers[0], x, true);
  h1.push_back(a.acceleration);
  h1.push_back(a.brake);
  h1.push_back(a.steering);
  const auto m = dense(c.merged.layers[0], h1, false);
  const auto h3 = dense(c.merged.layers[1], m, true);
  if (last_hidden) *last_hidden = h3;
  return dense(c.merged.layers[2], h3, false)[0];
}

}  // namespace drivepg::testing
