#pragma once

#include <cstdint>
#include <span>

#include "drivepg/simulator.hpp"

namespace drivepg::sim {

struct EpisodeMetrics {
  std::uint64_t steps = 0;
  double total_reward = 0.0;
  double total_distance_m = 0.0;
  double mean_speed_kmh = 0.0;
  double mean_step_gain = 0.0;
  double var_dist_center_m2 = 0.0;
  /// Largest |trackPos| seen; not exported, used by evaluation checks.
  double max_abs_track_pos = 0.0;
};

struct StepRecord {
  StepResult result;
  CarState state;
};

/// Streaming episode statistics. Speed counts only the longitudinal
/// component; the centre-distance variance is the population variance of
/// trackPos * half_width.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(double half_width) : half_width_(half_width) {}

  void add(const StepResult& result, const CarState& state);
  std::uint64_t steps() const { return count_; }
  /// Throws UsageError for an empty episode.
  EpisodeMetrics finish() const;

 private:
  double half_width_;
  std::uint64_t count_ = 0;
  double reward_sum_ = 0.0;
  double speed_sum_ = 0.0;
  double offset_mean_ = 0.0;
  double offset_m2_ = 0.0;
  double last_progress_ = 0.0;
  double max_abs_track_pos_ = 0.0;
};

EpisodeMetrics episode_metrics(std::span<const StepRecord> history, double half_width);

}  // namespace drivepg::sim
