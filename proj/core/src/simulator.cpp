#include "drivepg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace drivepg::sim {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Running: return "running";
    case Termination::OutOfTrack: return "out_of_track";
    case Termination::WrongWay: return "wrong_way";
    case Termination::StepCap: return "step_cap";
  }
  return "unknown";
}

bool RewardWeights::valid() const {
  return std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma) && alpha >= 0.0 &&
         beta >= 0.0 && gamma >= 0.0;
}

CarState reset(const TrackDefinition& track, std::uint64_t /*seed*/) {
  CarState s;
  s.position = track.centerline().front();
  s.heading = wrap_angle(track.heading_at(0.0));
  return s;
}

CarState place(const TrackDefinition& track, double station, double lateral, double heading_offset,
               double speed) {
  CarState s;
  s.position = track.offset_point(station, lateral);
  s.heading = wrap_angle(track.heading_at(station) + heading_offset);
  s.speed_long = speed;
  s.station = track.project(s.position).station;
  return s;
}

namespace {

double ray_segment_distance(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  const double denom = cross(dir, e);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  const Vec2 w = a - origin;
  const double t = cross(w, e) / denom;
  const double u = cross(w, dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::numeric_limits<double>::infinity();
  return t;
}

double nearest_hit(std::span<const Vec2> boundary, Vec2 origin, Vec2 dir, double best) {
  const std::size_t n = boundary.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, ray_segment_distance(origin, dir, boundary[i], boundary[(i + 1) % n]));
  return best;
}

}  // namespace

double cast_ray(const TrackDefinition& track, Vec2 origin, double direction, double max_range) {
  const Vec2 dir{std::cos(direction), std::sin(direction)};
  double best = max_range;
  best = nearest_hit(track.left_boundary(), origin, dir, best);
  best = nearest_hit(track.right_boundary(), origin, dir, best);
  return std::clamp(best, 0.0, max_range);
}

std::array<double, kRangeFinderCount> range_finders(const CarState& state,
                                                    const TrackDefinition& track) {
  std::array<double, kRangeFinderCount> out{};
  const auto proj = track.project(state.position);
  if (std::abs(proj.lateral) > track.half_width()) return out;
  for (std::size_t k = 0; k < kRangeFinderCount; ++k) {
    const double rel = (-90.0 + 10.0 * static_cast<double>(k)) * std::numbers::pi / 180.0;
    out[k] = cast_ray(track, state.position, state.heading + rel);
  }
  return out;
}

Observation observe(const CarState& state, const TrackDefinition& track,
                    const VehicleParams& vehicle) {
  const auto proj = track.project(state.position);
  Observation o;
  o.angle = wrap_angle(state.heading - proj.tangent_heading);
  o.track = range_finders(state, track);
  o.track_pos = proj.lateral / track.half_width();
  o.speed_x = state.speed_long * kMsToKmh;
  o.speed_y = state.speed_lat * kMsToKmh;
  o.speed_z = 0.0;
  o.wheel_spin.fill(state.speed_long / vehicle.wheel_radius);
  o.rpm = state.speed_long / vehicle.max_speed;
  return o;
}

double compute_reward(const Observation& obs, const RewardWeights& w) {
  const double vx = obs.speed_x;
  const double off = std::abs(obs.track_pos);
  return vx * std::cos(obs.angle) - w.alpha * vx * std::abs(std::sin(obs.angle)) - w.gamma * off -
         w.beta * vx * off;
}

StepOutcome step(const Environment& env, const CarState& state, const Action& action, double dt) {
  const auto& v = env.vehicle;
  const auto& track = env.track;
  const auto before = track.project(state.position);

  CarState next = state;
  // Semi-implicit Euler: speed first, then heading and position use the new speed.
  const double accel =
      v.accel_gain * action.acceleration - v.brake_gain * action.brake - v.drag * state.speed_long;
  next.speed_long = std::clamp(state.speed_long + accel * dt, 0.0, v.max_speed);
  const double yaw_rate = next.speed_long / v.wheelbase * std::tan(v.max_steer * action.steering);
  next.heading = wrap_angle(state.heading + yaw_rate * dt);
  next.position = state.position + Vec2{std::cos(next.heading), std::sin(next.heading)} * (next.speed_long * dt);

  const auto after = track.project(next.position);
  next.speed_lat = (after.lateral - before.lateral) / dt;
  double ds = after.station - before.station;
  const double half_loop = 0.5 * track.length();
  if (ds > half_loop) ds -= track.length();
  if (ds < -half_loop) ds += track.length();
  next.arc_progress = state.arc_progress + ds;
  next.station = after.station;
  next.steps = state.steps + 1;

  StepOutcome out;
  out.result.observation = observe(next, track, v);
  out.result.reward = compute_reward(out.result.observation, env.reward);

  const double angle = out.result.observation.angle;
  next.wrong_way_count = std::abs(angle) > std::numbers::pi / 2 ? state.wrong_way_count + 1 : 0;

  if (std::abs(out.result.observation.track_pos) > 1.0) {
    out.result.reason = Termination::OutOfTrack;
  } else if (next.wrong_way_count >= env.limits.wrong_way_steps) {
    out.result.reason = Termination::WrongWay;
  } else if (next.steps >= env.limits.max_steps) {
    out.result.reason = Termination::StepCap;
  }
  out.result.terminal = out.result.reason != Termination::Running;
  out.state = next;
  return out;
}

}  // namespace drivepg::sim
