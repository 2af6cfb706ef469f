#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "drivepg/agent.hpp"
#include "drivepg/checkpoint.hpp"
#include "drivepg/config.hpp"
#include "drivepg/metrics.hpp"
#include "drivepg/noise.hpp"
#include "drivepg/random.hpp"
#include "drivepg/replay_buffer.hpp"
#include "drivepg/simulator.hpp"

namespace drivepg::harness {

/// One line of the metrics file.
struct EpisodeRow {
  std::uint64_t episode = 0;
  sim::EpisodeMetrics metrics;
  double epsilon = 0.0;
  sim::Termination termination = sim::Termination::Running;
};

inline constexpr const char* kMetricsHeader =
    "episode,steps,total_reward,total_distance_m,mean_speed_kmh,mean_step_gain,var_dist_center_m2,"
    "epsilon";

std::string format_metrics_row(const EpisodeRow& row);
void write_metrics(std::ostream& out, const std::vector<EpisodeRow>& rows);

/// Called after every environment step with the post-step record.
using StepObserver = std::function<void(const sim::StepRecord&)>;

/// Sequential DDPG training loop. All randomness derives from one root
/// generator seeded with `config.seed`: network initialisation, exploration
/// noise, and replay sampling each get a child stream split from it.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);
  /// Continues exactly where `checkpoint` left off.
  static Trainer resume(const Checkpoint& checkpoint);

  /// Runs one episode with exploration and learning.
  EpisodeRow run_episode(const StepObserver& observer = {});

  Checkpoint checkpoint() const;

  double epsilon() const;
  std::uint64_t episodes_completed() const { return episodes_completed_; }
  std::uint64_t total_steps() const { return total_steps_; }
  std::uint64_t updates() const { return updates_; }
  const TrainConfig& config() const { return config_; }
  const ddpg::DdpgAgent& agent() const { return agent_; }
  const sim::Environment& environment() const { return env_; }
  const ddpg::ReplayBuffer& buffer() const { return buffer_; }

 private:
  Trainer(TrainConfig config, sim::Environment env, ddpg::DdpgAgent agent, ddpg::ReplayBuffer buffer,
          Rng root, Rng noise_rng);

  TrainConfig config_;
  sim::Environment env_;
  ddpg::DdpgAgent agent_;
  ddpg::ReplayBuffer buffer_;
  ddpg::OuNoise noise_;
  Rng root_rng_;
  Rng noise_rng_;
  std::uint64_t episodes_completed_ = 0;
  std::uint64_t total_steps_ = 0;
  std::uint64_t updates_ = 0;
};

/// Environment for a config: resolves the track and applies reward, step cap, and dt.
sim::Environment make_environment(const TrainConfig& config);
sim::Environment make_environment(const TrainConfig& config, const std::string& track);

struct TrainSummary {
  std::vector<EpisodeRow> rows;
  std::filesystem::path metrics_path;
  std::filesystem::path final_checkpoint;
};

/// Trains for `config.episodes` episodes under `output_dir`, writing
/// metrics.csv (one row per episode, flushed as it goes), checkpoint_epN.ckpt
/// every `checkpoint_interval` episodes, and checkpoint_final.ckpt. On a
/// numerical failure it writes checkpoint_diagnostic.ckpt and rethrows.
TrainSummary train(const TrainConfig& config, const std::filesystem::path& output_dir);

struct EvalOptions {
  std::uint64_t episodes = 1;
  /// 0 keeps the checkpoint's step cap.
  std::uint64_t max_steps = 0;
  /// Adds the checkpoint's exploration noise (continuing its noise stream and
  /// epsilon schedule) instead of acting greedily.
  bool noise = false;
};

/// Rolls out the checkpointed policy on `track` without learning.
std::vector<EpisodeRow> evaluate(const Checkpoint& checkpoint, const std::string& track,
                                 const EvalOptions& options, const StepObserver& observer = {});

}  // namespace drivepg::harness
