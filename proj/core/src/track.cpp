#include "drivepg/track.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "drivepg/errors.hpp"

namespace drivepg::sim {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a >= -std::numbers::pi && a <= std::numbers::pi) return a;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0.0) a += two_pi;
  return a - std::numbers::pi;
}

namespace {

Vec2 left_normal(Vec2 d) { return {-d.y, d.x}; }

Vec2 unit(Vec2 d) {
  const double n = norm(d);
  return {d.x / n, d.y / n};
}

/// Proper or touching intersection of segments ab and cd.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  if (d1 == 0 && on_segment(a, b, c)) return true;
  if (d2 == 0 && on_segment(a, b, d)) return true;
  if (d3 == 0 && on_segment(c, d, a)) return true;
  if (d4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool closed_polyline_is_simple(const std::vector<Vec2>& p) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool polylines_cross(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (segments_intersect(a[i], a[(i + 1) % n], b[j], b[(j + 1) % n])) return true;
  return false;
}

}  // namespace

TrackDefinition TrackDefinition::create(std::string name, double half_width,
                                        std::vector<Vec2> centerline) {
  if (name.empty()) throw ConfigurationError("track name is empty");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigurationError("track half width must be positive and finite");
  const std::size_t n = centerline.size();
  if (n < 3) throw ConfigurationError("track needs at least 3 centerline points");
  for (const auto& p : centerline)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw ConfigurationError("track centerline has a non-finite point");

  TrackDefinition t;
  t.name_ = std::move(name);
  t.half_width_ = half_width;
  t.centerline_ = std::move(centerline);
  t.cumulative_.resize(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.cumulative_[i] = s;
    const double len = norm(t.segment_end(i) - t.segment_start(i));
    if (!(len > 0.0))
      throw ConfigurationError("track centerline repeats point " + std::to_string(i));
    s += len;
  }
  t.length_ = s;

  t.left_.resize(n);
  t.right_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const Vec2 n0 = left_normal(unit(t.segment_end(prev) - t.segment_start(prev)));
    const Vec2 n1 = left_normal(unit(t.segment_end(i) - t.segment_start(i)));
    const Vec2 sum = n0 + n1;
    if (norm(sum) < 1e-9) throw ConfigurationError("track centerline reverses at point " + std::to_string(i));
    const Vec2 miter = unit(sum);
    const double reach = half_width / dot(miter, n1);
    t.left_[i] = t.centerline_[i] + miter * reach;
    t.right_[i] = t.centerline_[i] - miter * reach;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = t.segment_end(i) - t.segment_start(i);
    const std::size_t j = (i + 1) % n;
    if (dot(t.left_[j] - t.left_[i], d) <= 0.0 || dot(t.right_[j] - t.right_[i], d) <= 0.0)
      throw ConfigurationError("track is too narrow a turn for its width at segment " + std::to_string(i));
  }
  if (!closed_polyline_is_simple(t.centerline_))
    throw ConfigurationError("track centerline self-intersects");
  if (!closed_polyline_is_simple(t.left_) || !closed_polyline_is_simple(t.right_) ||
      polylines_cross(t.left_, t.right_))
    throw ConfigurationError("track boundaries self-intersect at half width " + std::to_string(half_width));
  return t;
}

TrackProjection TrackDefinition::project(Vec2 p) const {
  const std::size_t n = centerline_.size();
  double best = std::numeric_limits<double>::infinity();
  TrackProjection out;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = segment_start(i);
    const Vec2 d = segment_end(i) - a;
    const double len2 = dot(d, d);
    const double u = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    const Vec2 foot = a + d * u;
    const Vec2 r = p - foot;
    const double dist2 = dot(r, r);
    if (dist2 < best) {
      best = dist2;
      const double len = std::sqrt(len2);
      const double side = cross(d, p - a);
      out.segment = i;
      out.station = cumulative_[i] + u * len;
      out.lateral = side > 0.0 ? std::sqrt(dist2) : (side < 0.0 ? -std::sqrt(dist2) : 0.0);
      out.tangent_heading = std::atan2(d.y, d.x);
    }
  }
  if (out.station >= length_) out.station -= length_;
  return out;
}

std::size_t TrackDefinition::segment_at(double station) const {
  double s = std::fmod(station, length_);
  if (s < 0.0) s += length_;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  return static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
}

Vec2 TrackDefinition::point_at(double station) const {
  double s = std::fmod(station, length_);
  if (s < 0.0) s += length_;
  const std::size_t i = segment_at(s);
  const Vec2 a = segment_start(i);
  const Vec2 d = segment_end(i) - a;
  return a + d * ((s - cumulative_[i]) / norm(d));
}

double TrackDefinition::heading_at(double station) const {
  const std::size_t i = segment_at(station);
  const Vec2 d = segment_end(i) - segment_start(i);
  return std::atan2(d.y, d.x);
}

Vec2 TrackDefinition::offset_point(double station, double lateral) const {
  const std::size_t i = segment_at(station);
  const Vec2 n = left_normal(unit(segment_end(i) - segment_start(i)));
  return point_at(station) + n * lateral;
}

namespace {

std::string strip(std::string_view line) {
  const auto hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  const auto first = line.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = line.find_last_not_of(" \t\r");
  return std::string(line.substr(first, last - first + 1));
}

double parse_number(const std::string& token, std::size_t line_no) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigurationError("track line " + std::to_string(line_no) + ": '" + token +
                             "' is not a number");
  return v;
}

}  // namespace

TrackDefinition parse_track(std::string_view text) {
  std::string name;
  double half_width = 0.0;
  bool have_width = false;
  std::vector<Vec2> points;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip(raw);
    if (line.empty()) continue;
    if (name.empty()) {
      name = line;
      continue;
    }
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (!have_width) {
      if (tokens.size() != 1)
        throw ConfigurationError("track line " + std::to_string(line_no) + ": expected the half width");
      half_width = parse_number(tokens[0], line_no);
      have_width = true;
      continue;
    }
    if (tokens.size() != 2)
      throw ConfigurationError("track line " + std::to_string(line_no) + ": expected 'x y'");
    points.push_back({parse_number(tokens[0], line_no), parse_number(tokens[1], line_no)});
  }
  if (name.empty()) throw ConfigurationError("track file has no name line");
  if (!have_width) throw ConfigurationError("track file has no half width line");
  return TrackDefinition::create(std::move(name), half_width, std::move(points));
}

TrackDefinition load_track_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open track file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_track(buf.str());
}

std::string format_track(const TrackDefinition& track) {
  std::ostringstream out;
  out.precision(17);
  out << track.name() << '\n' << track.half_width() << '\n';
  for (const auto& p : track.centerline()) out << p.x << ' ' << p.y << '\n';
  return out.str();
}

namespace {

void append_arc(std::vector<Vec2>& pts, Vec2 center, double radius, double from, double to,
                int segments) {
  // Appends arc points excluding the start angle, including the end angle.
  for (int k = 1; k <= segments; ++k) {
    const double a = from + (to - from) * k / segments;
    pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
}

/// Two straights joined by semicircles, driven counter-clockwise from (0, 0).
std::vector<Vec2> stadium(double straight, double radius, int arc_segments) {
  constexpr double pi = std::numbers::pi;
  std::vector<Vec2> pts{{0.0, 0.0}};
  pts.push_back({straight, 0.0});
  append_arc(pts, {straight, radius}, radius, -pi / 2, pi / 2, arc_segments);
  pts.push_back({0.0, 2 * radius});
  append_arc(pts, {0.0, radius}, radius, pi / 2, 3 * pi / 2, arc_segments);
  pts.pop_back();  // closes onto (0, 0)
  return pts;
}

std::vector<Vec2> wavy_loop(double base_radius, double amplitude, int lobes, int points) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    // Start on a lobe's zero crossing, heading counter-clockwise.
    const double phi = 2.0 * std::numbers::pi * k / points;
    const double r = base_radius + amplitude * std::sin(lobes * phi);
    pts.push_back({r * std::cos(phi), r * std::sin(phi)});
  }
  return pts;
}

}  // namespace

std::vector<std::string> builtin_track_names() { return {"straight", "oval", "scurve"}; }

TrackDefinition builtin_track(std::string_view name) {
  if (name == "straight") return TrackDefinition::create("straight", 6.0, stadium(1000.0, 150.0, 90));
  if (name == "oval") return TrackDefinition::create("oval", 6.0, stadium(200.0, 80.0, 180));
  if (name == "scurve") return TrackDefinition::create("scurve", 5.0, wavy_loop(150.0, 30.0, 4, 720));
  throw ConfigurationError("unknown built-in track '" + std::string(name) + "'");
}

TrackDefinition resolve_track(const std::string& name_or_path) {
  for (const auto& n : builtin_track_names())
    if (n == name_or_path) return builtin_track(n);
  if (std::filesystem::exists(name_or_path)) return load_track_file(name_or_path);
  throw ConfigurationError("'" + name_or_path + "' is neither a built-in track nor a readable file");
}

}  // namespace drivepg::sim
