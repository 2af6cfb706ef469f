#pragma once

// Binary checkpoint, little-endian throughout:
//
//   "DDPG"                      4-byte magic
//   u32 version                 kCheckpointVersion
//   str config                  canonical key=value text
//   u64 episodes_completed
//   u64 total_steps
//   str rng.root, rng.noise, rng.buffer
//   net actor, critic.state_path, critic.merged,
//       target_actor, target_critic.state_path, target_critic.merged
//   opt actor, critic.state_path, critic.merged
//   f64 gamma, f64 tau
//   arr noise state (3 values)
//   u64 replay capacity
//   arr replay records, 63 values each: state[29], action[3], reward,
//       next_state[29], terminal (0 or 1)
//
// where str = u64 byte length + bytes, arr = u64 count + count f64 values,
// net = u32 layer count + per layer {u32 rows, u32 cols, u8 activation,
// arr weights (row-major), arr biases}, and opt = u64 step count, f64 lr,
// beta1, beta2, epsilon, then per layer arr m.weights, m.biases, v.weights,
// v.biases. Trailing bytes are an error.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "drivepg/agent.hpp"
#include "drivepg/config.hpp"
#include "drivepg/random.hpp"
#include "drivepg/types.hpp"

namespace drivepg::harness {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  TrainConfig config;
  ddpg::DdpgAgent agent;
  std::uint64_t episodes_completed = 0;
  std::uint64_t total_steps = 0;
  Rng root_rng;
  Rng noise_rng;
  Rng buffer_rng;
  std::array<double, kActionSize> noise_state{};
  std::uint64_t replay_capacity = 0;
  std::vector<Experience> replay;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::string encode_checkpoint(const Checkpoint& checkpoint);
/// Throws FormatError naming the field that failed: bad magic, unsupported
/// version, truncation, inconsistent shapes, or trailing bytes.
Checkpoint decode_checkpoint(std::string_view bytes);

/// Throws IoError when the file cannot be written.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace drivepg::harness
