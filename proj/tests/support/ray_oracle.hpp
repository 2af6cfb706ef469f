#pragma once

// Ray-marching reference for the range finders. It never intersects
// segments analytically. It steps along the ray by the distance to the
// closest boundary edge, which cannot jump over a crossing, and reports a
// hit once that distance vanishes.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>

#include "drivepg/track.hpp"

namespace drivepg::testing {

inline double point_segment_distance(sim::Vec2 p, sim::Vec2 a, sim::Vec2 b) {
  const sim::Vec2 e = b - a;
  const double len2 = sim::dot(e, e);
  const double t = len2 > 0.0 ? std::clamp(sim::dot(p - a, e) / len2, 0.0, 1.0) : 0.0;
  return sim::norm(p - (a + e * t));
}

inline double distance_to_polyline(sim::Vec2 p, std::span<const sim::Vec2> loop) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < loop.size(); ++i)
    best = std::min(best, point_segment_distance(p, loop[i], loop[(i + 1) % loop.size()]));
  return best;
}

/// Distance along the ray to the first boundary point, capped at `max_range`.
/// Empty when the march does not settle (a grazing ray).
inline std::optional<double> march_ray(const sim::TrackDefinition& track, sim::Vec2 origin,
                                       double direction, double max_range,
                                       double hit_tolerance = 1e-10) {
  const sim::Vec2 dir{std::cos(direction), std::sin(direction)};
  double t = 0.0;
  for (int iter = 0; iter < 200000; ++iter) {
    const sim::Vec2 p = origin + dir * t;
    const double d = std::min(distance_to_polyline(p, track.left_boundary()),
                              distance_to_polyline(p, track.right_boundary()));
    if (d <= hit_tolerance) return std::min(t, max_range);
    t += d;
    if (t >= max_range) return max_range;
  }
  return std::nullopt;
}

}  // namespace drivepg::testing
