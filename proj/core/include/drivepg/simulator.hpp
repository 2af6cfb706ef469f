#pragma once

#include <array>
#include <cstdint>

#include "drivepg/track.hpp"
#include "drivepg/types.hpp"

namespace drivepg::sim {

/// Kinematic bicycle with a longitudinal force balance.
struct VehicleParams {
  double wheelbase = 2.5;             // m
  double max_steer = 21.0 * 3.14159265358979323846 / 180.0;  // rad
  double accel_gain = 8.0;            // m/s^2 at full throttle
  double brake_gain = 12.0;           // m/s^2 at full brake
  double drag = 0.08;                 // 1/s
  double max_speed = 85.0;            // m/s
  double wheel_radius = 0.33;         // m
};

/// Weights of the lateral-speed, speed-scaled offset, and offset penalties.
struct RewardWeights {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.1;

  bool valid() const;
  friend bool operator==(const RewardWeights&, const RewardWeights&) = default;
};

struct EpisodeLimits {
  std::uint64_t max_steps = 60000;
  /// Consecutive steps with |angle| > pi/2 before the episode ends.
  std::uint32_t wrong_way_steps = 5;
};

inline constexpr double kDefaultDt = 0.05;
inline constexpr double kMsToKmh = 3.6;

struct Environment {
  TrackDefinition track;
  VehicleParams vehicle;
  RewardWeights reward;
  EpisodeLimits limits;
  double dt = kDefaultDt;
};

struct CarState {
  Vec2 position;
  double heading = 0.0;      // rad, [-pi, pi]
  double speed_long = 0.0;   // m/s, [0, max_speed]
  double speed_lat = 0.0;    // m/s, rate of change of the lateral offset
  double arc_progress = 0.0; // m travelled along the centerline since reset
  std::uint64_t steps = 0;
  double station = 0.0;      // wrapped station of the last projection
  std::uint32_t wrong_way_count = 0;

  friend bool operator==(const CarState&, const CarState&) = default;
};

enum class Termination { Running, OutOfTrack, WrongWay, StepCap };

const char* to_string(Termination t);

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminal = false;
  Termination reason = Termination::Running;
};

/// Car on the centerline at station 0, aligned with the first segment, at rest.
/// The seed is accepted for interface symmetry; the start pose is fixed.
CarState reset(const TrackDefinition& track, std::uint64_t seed = 0);

/// Car at an arbitrary track-relative pose.
CarState place(const TrackDefinition& track, double station, double lateral,
               double heading_offset = 0.0, double speed = 0.0);

struct StepOutcome {
  CarState state;
  StepResult result;
};

/// Advances one control period. Pure: identical inputs give identical outputs.
StepOutcome step(const Environment& env, const CarState& state, const Action& action, double dt);
inline StepOutcome step(const Environment& env, const CarState& state, const Action& action) {
  return step(env, state, action, env.dt);
}

Observation observe(const CarState& state, const TrackDefinition& track,
                    const VehicleParams& vehicle = {});

/// Distances to the track edge along 19 rays from -90 to +90 degrees relative
/// to the heading, capped at 200 m. All zeros when the car is off the track.
std::array<double, kRangeFinderCount> range_finders(const CarState& state,
                                                    const TrackDefinition& track);

/// Distance along one ray to the first boundary crossing, capped at `max_range`.
double cast_ray(const TrackDefinition& track, Vec2 origin, double direction,
                double max_range = kRangeFinderMax);

/// R = Vx cos(angle) - alpha Vx |sin(angle)| - gamma |trackPos| - beta Vx |trackPos|
/// with Vx = speedX in km/h.
double compute_reward(const Observation& obs, const RewardWeights& weights);

}  // namespace drivepg::sim
