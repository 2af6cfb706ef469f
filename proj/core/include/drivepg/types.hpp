#pragma once

// Observation and action vectors shared by the learner and the simulator.

#include <array>
#include <cstddef>

namespace drivepg {

inline constexpr std::size_t kRangeFinderCount = 19;
inline constexpr std::size_t kWheelCount = 4;
inline constexpr std::size_t kObservationSize = 29;
inline constexpr std::size_t kActionSize = 3;
inline constexpr double kRangeFinderMax = 200.0;

/// One sensor reading. Flattened order: angle, track[19], trackPos,
/// speedX, speedY, speedZ, wheelSpin[4], rpm.
struct Observation {
  double angle = 0.0;                           // rad, car heading minus track tangent
  std::array<double, kRangeFinderCount> track{};  // m, -90..+90 deg in 10 deg steps
  double track_pos = 0.0;                       // lateral offset / half width, + is left
  double speed_x = 0.0;                         // km/h
  double speed_y = 0.0;                         // km/h
  double speed_z = 0.0;                         // km/h
  std::array<double, kWheelCount> wheel_spin{};   // rad/s
  double rpm = 0.0;                             // speed / v_max

  std::array<double, kObservationSize> to_array() const;
  static Observation from_array(const std::array<double, kObservationSize>& v);

  /// Finite, angle within [-pi, pi], every range finder within [0, 200].
  bool valid() const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Control command. Acceleration and brake in [0, 1]; steering in [-1, 1]
/// with +1 the maximum left turn.
struct Action {
  double acceleration = 0.0;
  double brake = 0.0;
  double steering = 0.0;

  std::array<double, kActionSize> to_array() const { return {acceleration, brake, steering}; }
  static Action from_array(const std::array<double, kActionSize>& v) { return {v[0], v[1], v[2]}; }

  bool valid() const;
  Action clamped() const;

  friend bool operator==(const Action&, const Action&) = default;
};

struct Experience {
  Observation state;
  Action action;
  double reward = 0.0;
  Observation next_state;
  bool terminal = false;

  friend bool operator==(const Experience&, const Experience&) = default;
};

}  // namespace drivepg
