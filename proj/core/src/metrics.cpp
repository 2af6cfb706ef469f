#include "drivepg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "drivepg/errors.hpp"

namespace drivepg::sim {

void MetricsAccumulator::add(const StepResult& result, const CarState& state) {
  ++count_;
  reward_sum_ += result.reward;
  speed_sum_ += result.observation.speed_x;
  const double offset = result.observation.track_pos * half_width_;
  // Welford update.
  const double delta = offset - offset_mean_;
  offset_mean_ += delta / static_cast<double>(count_);
  offset_m2_ += delta * (offset - offset_mean_);
  last_progress_ = state.arc_progress;
  max_abs_track_pos_ = std::max(max_abs_track_pos_, std::abs(result.observation.track_pos));
}

EpisodeMetrics MetricsAccumulator::finish() const {
  if (count_ == 0) throw UsageError("episode has no steps");
  const double n = static_cast<double>(count_);
  EpisodeMetrics m;
  m.steps = count_;
  m.total_reward = reward_sum_;
  m.total_distance_m = last_progress_;
  m.mean_speed_kmh = speed_sum_ / n;
  m.mean_step_gain = reward_sum_ / n;
  m.var_dist_center_m2 = offset_m2_ / n;
  m.max_abs_track_pos = max_abs_track_pos_;
  return m;
}

EpisodeMetrics episode_metrics(std::span<const StepRecord> history, double half_width) {
  MetricsAccumulator acc(half_width);
  for (const auto& r : history) acc.add(r.result, r.state);
  return acc.finish();
}

}  // namespace drivepg::sim
