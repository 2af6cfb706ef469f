#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drivepg::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Wraps an angle into [-pi, pi].
double wrap_angle(double a);

/// Where a point sits relative to the centerline.
struct TrackProjection {
  double station = 0.0;  // arc length of the foot point, [0, length)
  double lateral = 0.0;  // signed distance, + is left of the driving direction
  double tangent_heading = 0.0;
  std::size_t segment = 0;
};

/// Closed centerline polyline with constant half width. The last point
/// connects back to the first. Boundaries are the centerline offset by
/// +-half_width with mitered joins, so each boundary edge runs parallel to its
/// centerline segment at exactly half_width.
class TrackDefinition {
 public:
  /// Validates and precomputes arc lengths and boundaries. Throws
  /// ConfigurationError for fewer than 3 points, repeated consecutive points,
  /// a non-positive width, or boundaries that self-intersect.
  static TrackDefinition create(std::string name, double half_width, std::vector<Vec2> centerline);

  const std::string& name() const { return name_; }
  double half_width() const { return half_width_; }
  double length() const { return length_; }
  std::size_t segment_count() const { return centerline_.size(); }

  std::span<const Vec2> centerline() const { return centerline_; }
  /// Arc length at each centerline vertex; starts at 0, strictly increasing.
  std::span<const double> cumulative_length() const { return cumulative_; }
  std::span<const Vec2> left_boundary() const { return left_; }
  std::span<const Vec2> right_boundary() const { return right_; }

  /// Nearest-segment projection.
  TrackProjection project(Vec2 p) const;
  /// Centerline point and segment heading at a station (wrapped into the loop).
  Vec2 point_at(double station) const;
  double heading_at(double station) const;
  /// Point displaced `lateral` metres to the left of the centerline at `station`.
  Vec2 offset_point(double station, double lateral) const;

  /// Edge i runs from vertex i to vertex (i + 1) mod n.
  Vec2 segment_start(std::size_t i) const { return centerline_[i]; }
  Vec2 segment_end(std::size_t i) const { return centerline_[(i + 1) % centerline_.size()]; }

 private:
  std::size_t segment_at(double station) const;

  std::string name_;
  double half_width_ = 0.0;
  double length_ = 0.0;
  std::vector<Vec2> centerline_;
  std::vector<double> cumulative_;
  std::vector<Vec2> left_;
  std::vector<Vec2> right_;
};

/// Text format: first non-comment line is the name, the second the half width
/// in metres, every following line an `x y` centerline point. `#` starts a
/// comment. Errors are reported as ConfigurationError with a line number.
TrackDefinition parse_track(std::string_view text);
TrackDefinition load_track_file(const std::filesystem::path& path);
std::string format_track(const TrackDefinition& track);

/// Built-in tracks: `straight`, `oval`, `scurve`.
std::vector<std::string> builtin_track_names();
TrackDefinition builtin_track(std::string_view name);

/// A built-in name, or otherwise a path to a track file.
TrackDefinition resolve_track(const std::string& name_or_path);

}  // namespace drivepg::sim
