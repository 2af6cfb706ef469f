#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "drivepg/agent.hpp"
#include "drivepg/noise.hpp"
#include "drivepg/simulator.hpp"

namespace drivepg::harness {

/// Everything a training run depends on. Defaults follow the reference
/// hyperparameters: buffer 100000, gamma 0.99, actor/critic learning rates
/// 1e-4/1e-3, batch 32, tau 0.001, 60000-step episode cap.
struct TrainConfig {
  std::string track = "oval";
  std::uint64_t episodes = 200;
  std::uint64_t max_steps = 60000;
  std::uint64_t buffer_capacity = 100000;
  std::uint64_t batch_size = 32;
  double gamma = 0.99;
  double tau = 0.001;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  sim::RewardWeights reward;
  double reward_scale = 0.01;
  ddpg::OuParameters ou;
  std::uint64_t epsilon_decay_steps = 100000;
  std::uint64_t warmup = 300;
  std::uint64_t seed = 1;
  std::uint64_t checkpoint_interval = 50;
  std::string output_dir = "runs/default";
  std::vector<std::size_t> actor_hidden{300, 600};
  std::uint64_t critic_state_width = 300;
  std::uint64_t critic_merge_width = 600;
  std::uint64_t critic_hidden_width = 600;
  double dt = sim::kDefaultDt;

  /// Throws ConfigurationError naming the first invalid field.
  void validate() const;

  ddpg::AgentConfig agent_config() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Parses `key=value` lines. `#` starts a comment; blank lines are ignored.
/// Unknown or repeated keys and malformed values throw ConfigurationError.
/// The result is validated.
TrainConfig parse_config(std::string_view text);
TrainConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const TrainConfig& config);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace drivepg::harness
