#include "drivepg/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace drivepg {

std::array<double, kObservationSize> Observation::to_array() const {
  std::array<double, kObservationSize> v{};
  std::size_t i = 0;
  v[i++] = angle;
  for (double t : track) v[i++] = t;
  v[i++] = track_pos;
  v[i++] = speed_x;
  v[i++] = speed_y;
  v[i++] = speed_z;
  for (double w : wheel_spin) v[i++] = w;
  v[i++] = rpm;
  return v;
}

Observation Observation::from_array(const std::array<double, kObservationSize>& v) {
  Observation o;
  std::size_t i = 0;
  o.angle = v[i++];
  for (double& t : o.track) t = v[i++];
  o.track_pos = v[i++];
  o.speed_x = v[i++];
  o.speed_y = v[i++];
  o.speed_z = v[i++];
  for (double& w : o.wheel_spin) w = v[i++];
  o.rpm = v[i++];
  return o;
}

bool Observation::valid() const {
  for (double x : to_array())
    if (!std::isfinite(x)) return false;
  if (angle < -std::numbers::pi || angle > std::numbers::pi) return false;
  return std::all_of(track.begin(), track.end(),
                     [](double t) { return t >= 0.0 && t <= kRangeFinderMax; });
}

bool Action::valid() const {
  return acceleration >= 0.0 && acceleration <= 1.0 && brake >= 0.0 && brake <= 1.0 &&
         steering >= -1.0 && steering <= 1.0;
}

Action Action::clamped() const {
  // NaN maps to the lower bound so the result is always in range.
  auto clamp = [](double x, double lo, double hi) {
    if (!(x >= lo)) return lo;
    return x > hi ? hi : x;
  };
  return {clamp(acceleration, 0.0, 1.0), clamp(brake, 0.0, 1.0), clamp(steering, -1.0, 1.0)};
}

}  // namespace drivepg
