#include "skytrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "csv_util.hpp"
#include "json_util.hpp"
#include "skytrack/error.hpp"
#include "skytrack/io.hpp"

namespace skytrack {

namespace {

using detail::json;

constexpr double kDeg = std::numbers::pi / 180.0;

// Distributions are written out rather than taken from <random> because the
// standard ones are implementation-defined and would break reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::mt19937_64 engine_;
};

struct PathPoint {
  Point pos;
  double heading_deg = 0.0;  // direction of the segment being driven
};

class Path {
 public:
  explicit Path(const std::vector<Point>& pts) : pts_(pts) {
    cum_.push_back(0.0);
    for (std::size_t i = 1; i < pts_.size(); ++i) {
      cum_.push_back(cum_.back() + std::hypot(pts_[i].x - pts_[i - 1].x, pts_[i].y - pts_[i - 1].y));
    }
  }

  double length() const { return cum_.back(); }

  PathPoint at(double s) const {
    s = std::clamp(s, 0.0, length());
    std::size_t seg = 1;
    while (seg + 1 < pts_.size() && cum_[seg] < s) ++seg;
    const Point& a = pts_[seg - 1];
    const Point& b = pts_[seg];
    const double len = cum_[seg] - cum_[seg - 1];
    const double f = (s - cum_[seg - 1]) / len;
    return {{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)}, std::atan2(b.y - a.y, b.x - a.x) / kDeg};
  }

 private:
  std::vector<Point> pts_;
  std::vector<double> cum_;
};

struct Kinematics {
  double distance = 0.0;
  double speed = 0.0;
  double accel = 0.0;
};

// Constant acceleration from the start time; a decelerating vehicle stops
// and stays put.
Kinematics kinematics(const VehicleSpec& v, double tau) {
  const double a = v.accel_mps2;
  if (a < 0.0) {
    const double t_stop = v.speed_mps / -a;
    if (tau >= t_stop) return {v.speed_mps * t_stop + 0.5 * a * t_stop * t_stop, 0.0, 0.0};
  }
  return {v.speed_mps * tau + 0.5 * a * tau * tau, v.speed_mps + a * tau, a};
}

BoxXYWH footprint_box(const Point& center_px, double heading_deg, const VehicleSpec& v, double mpp) {
  const double c = std::abs(std::cos(heading_deg * kDeg));
  const double s = std::abs(std::sin(heading_deg * kDeg));
  const double w = (c * v.length_m + s * v.width_m) / mpp;
  const double h = (s * v.length_m + c * v.width_m) / mpp;
  return {center_px.x - w / 2.0, center_px.y - h / 2.0, w, h};
}

bool occluded(const VehicleSpec& v, double t) {
  return std::any_of(v.occlusions.begin(), v.occlusions.end(),
                     [t](const Occlusion& o) { return t >= o.start_s && t < o.end_s; });
}

std::int64_t frame_at(double time_s, double fps) {
  return static_cast<std::int64_t>(std::ceil(time_s * fps - 1e-9));
}

// ---- presets ----------------------------------------------------------------

Scenario base(std::string name, double duration) {
  Scenario s;
  s.name = std::move(name);
  s.duration_s = duration;
  return s;
}

VehicleSpec vehicle(std::int64_t id, std::vector<Point> pts, double speed) {
  VehicleSpec v;
  v.id = id;
  v.waypoints_m = std::move(pts);
  v.speed_mps = speed;
  return v;
}

double time_at_distance(const VehicleSpec& v, double s) { return v.start_time_s + s / v.speed_mps; }

Scenario two_crossing() {
  Scenario s = base("two-crossing-vehicles", 12.0);
  s.vehicles.push_back(vehicle(1, {{-80.0, -3.5}, {80.0, -3.5}}, 10.0));
  s.vehicles.push_back(vehicle(2, {{-3.5, 45.0}, {-3.5, -45.0}}, 8.0));
  return s;
}

Scenario occlusion_gap() {
  Scenario s = base("occlusion-gap", 10.0);
  VehicleSpec a = vehicle(1, {{-70.0, 5.0}, {70.0, 5.0}}, 10.0);
  a.occlusions.push_back({4.99, 5.09});  // frames 150 to 152 at 30 fps
  s.vehicles.push_back(a);
  s.vehicles.push_back(vehicle(2, {{70.0, -5.0}, {-70.0, -5.0}}, 12.0));
  return s;
}

Scenario lane_change_left() {
  Scenario s = base("lane-change-left", 9.0);
  VehicleSpec a = vehicle(1, {{3.5, -45.0}, {3.5, -5.0}, {0.0, 5.0}, {0.0, 45.0}}, 10.0);
  const double mid = 40.0 + 0.5 * std::hypot(3.5, 10.0);
  a.maneuvers.push_back({time_at_distance(a, mid), LaneChange::Left});
  s.vehicles.push_back(a);
  s.vehicles.push_back(vehicle(2, {{-3.5, 45.0}, {-3.5, -45.0}}, 10.0));
  s.vehicles.push_back(vehicle(3, {{7.0, -45.0}, {7.0, 45.0}}, 12.0));
  return s;
}

Scenario left_turn() {
  Scenario s = base("left-turn", 12.0);
  // Southbound, then a quarter circle of radius 10 m onto an eastbound road.
  const Point c{8.25, 8.0};
  const double r = 10.0;
  std::vector<Point> pts{{-1.75, 45.0}};
  for (int deg = 180; deg <= 270; deg += 5) pts.push_back({c.x + r * std::cos(deg * kDeg), c.y + r * std::sin(deg * kDeg)});
  pts.push_back({80.0, -2.0});
  VehicleSpec a = vehicle(1, pts, 8.0);
  const Path path(a.waypoints_m);
  const double arc_mid = 37.0 + 0.5 * (path.length() - 37.0 - (80.0 - 8.25));
  a.maneuvers.push_back({time_at_distance(a, arc_mid), LaneChange::Turn});
  s.vehicles.push_back(a);
  s.vehicles.push_back(vehicle(2, {{-5.25, 45.0}, {-5.25, -45.0}}, 9.0));
  return s;
}

Scenario load_27() {
  Scenario s = base("load-27", 6.0);
  std::int64_t id = 1;
  for (int lane = 0; lane < 9; ++lane) {
    const double y = -40.0 + 10.0 * lane;
    const bool east = lane % 2 == 0;
    for (double x0 : {-70.0, -25.0, 20.0}) {
      const double start = east ? x0 : -x0;
      const double end = east ? start + 40.0 : start - 40.0;
      s.vehicles.push_back(vehicle(id++, {{start, y}, {end, y}}, 5.0));
    }
  }
  return s;
}

Scenario straight(Direction d) {
  const double h = direction_center_deg(d) * kDeg;
  std::string name = "straight-" + std::string(to_string(d));
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
  Scenario s = base(name, 6.0);
  const Point u{std::cos(h), std::sin(h)};
  s.vehicles.push_back(vehicle(1, {{-30.0 * u.x, -30.0 * u.y}, {30.0 * u.x, 30.0 * u.y}}, 10.0));
  return s;
}

// ---- JSON -------------------------------------------------------------------

Point parse_point(const json& j, std::string_view section) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(fmt::format("\"{}\" waypoints must be [x, y] pairs", section));
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

VehicleSpec parse_vehicle(const json& j, std::size_t index) {
  const std::string section = fmt::format("vehicles[{}]", index);
  detail::check_keys(j, section,
                     {"id", "waypoints", "speed_mps", "accel_mps2", "start_time_s", "length_m", "width_m",
                      "maneuvers", "occlusions"});
  VehicleSpec v;
  if (!j.contains("id")) throw ParseError(fmt::format("\"{}\" is missing \"id\"", section));
  v.id = detail::get_integer(j, section, "id", 0);
  if (!j.contains("waypoints") || !j.at("waypoints").is_array()) {
    throw ParseError(fmt::format("\"{}\" needs a \"waypoints\" array", section));
  }
  for (const auto& p : j.at("waypoints")) v.waypoints_m.push_back(parse_point(p, section));
  v.speed_mps = detail::get_number(j, section, "speed_mps", v.speed_mps);
  v.accel_mps2 = detail::get_number(j, section, "accel_mps2", v.accel_mps2);
  v.start_time_s = detail::get_number(j, section, "start_time_s", v.start_time_s);
  v.length_m = detail::get_number(j, section, "length_m", v.length_m);
  v.width_m = detail::get_number(j, section, "width_m", v.width_m);
  if (j.contains("maneuvers")) {
    const json& ms = j.at("maneuvers");
    if (!ms.is_array()) throw ParseError(fmt::format("\"{}.maneuvers\" must be an array", section));
    for (const auto& m : ms) {
      detail::check_keys(m, section + ".maneuvers", {"time_s", "kind"});
      const auto kind = parse_lane_change(detail::get_string(m, section, "kind", "none"));
      if (!kind) throw ParseError(fmt::format("\"{}\" has an unknown maneuver kind", section));
      v.maneuvers.push_back({detail::get_number(m, section, "time_s", 0.0), *kind});
    }
  }
  if (j.contains("occlusions")) {
    const json& os = j.at("occlusions");
    if (!os.is_array()) throw ParseError(fmt::format("\"{}.occlusions\" must be an array", section));
    for (const auto& o : os) {
      if (!o.is_array() || o.size() != 2 || !o[0].is_number() || !o[1].is_number()) {
        throw ParseError(fmt::format("\"{}\" occlusions must be [start, end] pairs", section));
      }
      v.occlusions.push_back({o[0].get<double>(), o[1].get<double>()});
    }
  }
  return v;
}

}  // namespace

ScaleModel scenario_scale(const Scenario& s) {
  return pixel_scale(ground_width(s.camera), DrawingArea{0, 0, s.image.width, s.image.height});
}

Point ground_to_pixel(const Point& g, const ScaleModel& scale, const ViewSize& image) {
  return {image.width / 2.0 + g.x / scale.meters_per_pixel, image.height / 2.0 - g.y / scale.meters_per_pixel};
}

void validate(const Scenario& s) {
  if (!(s.duration_s > 0.0) || !std::isfinite(s.duration_s)) throw InvalidArgument("duration must be positive");
  if (!(s.fps > 0.0) || !std::isfinite(s.fps)) throw InvalidArgument("fps must be positive");
  validate(s.image);
  validate(s.camera);
  const auto& n = s.noise;
  if (!(n.position_sigma_px >= 0.0)) throw InvalidArgument("position noise must be >= 0");
  if (!(n.miss_probability >= 0.0 && n.miss_probability <= 1.0)) {
    throw InvalidArgument("miss probability must be in [0, 1]");
  }
  if (!(n.false_positive_rate >= 0.0) || n.false_positive_rate > 100.0) {
    throw InvalidArgument("false positive rate must be in [0, 100]");
  }

  const ScaleModel scale = scenario_scale(s);
  const double half_w = scale.ground_width_m / 2.0 + 1e-9;
  const double half_h = s.image.height * scale.meters_per_pixel / 2.0 + 1e-9;
  std::vector<std::int64_t> ids;
  for (const auto& v : s.vehicles) {
    if (std::find(ids.begin(), ids.end(), v.id) != ids.end()) {
      throw InvalidArgument(fmt::format("duplicate vehicle id {}", v.id));
    }
    ids.push_back(v.id);
    if (v.waypoints_m.size() < 2) throw InvalidArgument(fmt::format("vehicle {} needs two waypoints", v.id));
    for (std::size_t i = 0; i < v.waypoints_m.size(); ++i) {
      const Point& p = v.waypoints_m[i];
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || std::abs(p.x) > half_w || std::abs(p.y) > half_h) {
        throw InvalidArgument(fmt::format("vehicle {} waypoint ({}, {}) lies outside the {:.2f} x {:.2f} m footprint",
                                          v.id, p.x, p.y, 2 * half_w, 2 * half_h));
      }
      if (i > 0 && p.x == v.waypoints_m[i - 1].x && p.y == v.waypoints_m[i - 1].y) {
        throw InvalidArgument(fmt::format("vehicle {} repeats a waypoint", v.id));
      }
    }
    if (!(v.speed_mps >= 0.0) || !std::isfinite(v.accel_mps2) || (v.speed_mps == 0.0 && v.accel_mps2 <= 0.0)) {
      throw InvalidArgument(fmt::format("vehicle {} never moves", v.id));
    }
    if (!(v.start_time_s >= 0.0)) throw InvalidArgument(fmt::format("vehicle {} start time must be >= 0", v.id));
    if (!(v.length_m > 0.0) || !(v.width_m > 0.0)) {
      throw InvalidArgument(fmt::format("vehicle {} needs a positive size", v.id));
    }
    for (const auto& o : v.occlusions) {
      if (!(o.end_s > o.start_s)) throw InvalidArgument(fmt::format("vehicle {} has an empty occlusion", v.id));
    }
  }
}

SynthOutput generate(const Scenario& s) {
  validate(s);
  const ScaleModel scale = scenario_scale(s);
  const double mpp = scale.meters_per_pixel;
  std::vector<Path> paths;
  for (const auto& v : s.vehicles) paths.emplace_back(v.waypoints_m);

  SynthOutput out;
  out.frame_count = static_cast<std::int64_t>(std::floor(s.duration_s * s.fps + 1e-9));
  Rng rng(s.noise.seed);

  for (std::int64_t f = 0; f < out.frame_count; ++f) {
    const double t = static_cast<double>(f) / s.fps;
    DetectionFrame frame;
    frame.frame = f;
    frame.timestamp = t;

    for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
      const VehicleSpec& v = s.vehicles[i];
      if (t < v.start_time_s) continue;
      const Kinematics k = kinematics(v, t - v.start_time_s);
      if (k.distance > paths[i].length()) continue;
      const PathPoint pp = paths[i].at(k.distance);
      const Point center = ground_to_pixel(pp.pos, scale, s.image);
      const BoxXYWH box = footprint_box(center, pp.heading_deg, v, mpp);

      TruthRow row;
      row.frame = f;
      row.id = v.id;
      row.box = box;
      row.speed_mps = k.speed;
      row.acceleration_mps2 = k.accel;
      if (k.speed > 0.0) row.heading_deg = heading(std::cos(pp.heading_deg * kDeg), std::sin(pp.heading_deg * kDeg));
      row.direction = row.heading_deg ? classify_direction(*row.heading_deg, k.speed, 0.2) : Direction::Stationary;
      for (const auto& m : v.maneuvers) {
        if (frame_at(m.time_s, s.fps) == f) row.lane_change = m.kind;
      }
      row.timestamp = t;
      row.ground_m = pp.pos;
      out.truth.push_back(row);

      // Draw unconditionally so the stream does not shift when a vehicle is hidden.
      const double u = rng.uniform();
      const double jx = rng.normal() * s.noise.position_sigma_px;
      const double jy = rng.normal() * s.noise.position_sigma_px;
      if (occluded(v, t) || u < s.noise.miss_probability) continue;
      frame.boxes.push_back({{box.x + jx, box.y + jy, box.w, box.h}, 0.9, "car"});
    }

    const int fp = rng.poisson(s.noise.false_positive_rate);
    for (int j = 0; j < fp; ++j) {
      const double w = 4.5 / mpp;
      const double h = 1.8 / mpp;
      const double x = rng.uniform() * (s.image.width - w);
      const double y = rng.uniform() * (s.image.height - h);
      const double score = 0.3 + 0.3 * rng.uniform();
      frame.boxes.push_back({{x, y, w, h}, score, "car"});
    }
    out.detections.push_back(std::move(frame));
  }
  return out;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names{"two-crossing-vehicles", "occlusion-gap", "lane-change-left", "left-turn",
                                 "load-27"};
  for (int d = 0; d < 8; ++d) names.push_back(straight(static_cast<Direction>(d)).name);
  return names;
}

Scenario preset(std::string_view name) {
  if (name == "two-crossing-vehicles") return two_crossing();
  if (name == "occlusion-gap") return occlusion_gap();
  if (name == "lane-change-left") return lane_change_left();
  if (name == "left-turn") return left_turn();
  if (name == "load-27") return load_27();
  for (int d = 0; d < 8; ++d) {
    Scenario s = straight(static_cast<Direction>(d));
    if (s.name == name) return s;
  }
  throw InvalidArgument(fmt::format("unknown preset \"{}\"", name));
}

Scenario parse_scenario(std::string_view text) {
  const json root = detail::parse_json(text, "scenario");
  detail::check_keys(root, "scenario", {"name", "duration_s", "fps", "image", "camera", "noise", "vehicles"});
  Scenario s;
  s.name = detail::get_string(root, "scenario", "name", "custom");
  s.duration_s = detail::get_number(root, "scenario", "duration_s", s.duration_s);
  s.fps = detail::get_number(root, "scenario", "fps", s.fps);
  if (root.contains("image")) {
    const json& im = root.at("image");
    detail::check_keys(im, "image", {"width", "height"});
    s.image.width = static_cast<int>(detail::get_integer(im, "image", "width", s.image.width));
    s.image.height = static_cast<int>(detail::get_integer(im, "image", "height", s.image.height));
  }
  if (root.contains("camera")) {
    const json& cam = root.at("camera");
    detail::check_keys(cam, "camera", {"fov_deg", "altitude_m"});
    s.camera.lens_angle_deg = detail::get_number(cam, "camera", "fov_deg", s.camera.lens_angle_deg);
    s.camera.altitude_m = detail::get_number(cam, "camera", "altitude_m", s.camera.altitude_m);
  }
  if (root.contains("noise")) {
    const json& n = root.at("noise");
    detail::check_keys(n, "noise", {"position_sigma_px", "miss_probability", "false_positive_rate", "seed"});
    s.noise.position_sigma_px = detail::get_number(n, "noise", "position_sigma_px", 0.0);
    s.noise.miss_probability = detail::get_number(n, "noise", "miss_probability", 0.0);
    s.noise.false_positive_rate = detail::get_number(n, "noise", "false_positive_rate", 0.0);
    const std::int64_t seed = detail::get_integer(n, "noise", "seed", 1);
    if (seed < 0) throw ParseError("\"noise.seed\" must be non-negative");
    s.noise.seed = static_cast<std::uint64_t>(seed);
  }
  if (root.contains("vehicles")) {
    const json& vs = root.at("vehicles");
    if (!vs.is_array()) throw ParseError("\"vehicles\" must be an array");
    for (std::size_t i = 0; i < vs.size(); ++i) s.vehicles.push_back(parse_vehicle(vs[i], i));
  }
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json root;
  root["name"] = s.name;
  root["duration_s"] = s.duration_s;
  root["fps"] = s.fps;
  root["image"] = {{"width", s.image.width}, {"height", s.image.height}};
  root["camera"] = {{"fov_deg", s.camera.lens_angle_deg}, {"altitude_m", s.camera.altitude_m}};
  root["noise"] = {{"position_sigma_px", s.noise.position_sigma_px},
                   {"miss_probability", s.noise.miss_probability},
                   {"false_positive_rate", s.noise.false_positive_rate},
                   {"seed", s.noise.seed}};
  json vs = json::array();
  for (const auto& v : s.vehicles) {
    json pts = json::array();
    for (const auto& p : v.waypoints_m) pts.push_back({p.x, p.y});
    json ms = json::array();
    for (const auto& m : v.maneuvers) ms.push_back({{"time_s", m.time_s}, {"kind", std::string(to_string(m.kind))}});
    json os = json::array();
    for (const auto& o : v.occlusions) os.push_back({o.start_s, o.end_s});
    vs.push_back({{"id", v.id},
                  {"waypoints", pts},
                  {"speed_mps", v.speed_mps},
                  {"accel_mps2", v.accel_mps2},
                  {"start_time_s", v.start_time_s},
                  {"length_m", v.length_m},
                  {"width_m", v.width_m},
                  {"maneuvers", ms},
                  {"occlusions", os}});
  }
  root["vehicles"] = vs;
  return root.dump(2);
}

void write_truth_csv(std::ostream& out, std::span<const TruthRow> rows) {
  out << kTruthHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.frame, r.id, format_fixed(r.box.x),
                       format_fixed(r.box.y), format_fixed(r.box.w), format_fixed(r.box.h),
                       format_fixed(r.speed_mps),
                       r.acceleration_mps2 ? format_fixed(*r.acceleration_mps2) : std::string(),
                       r.heading_deg ? format_fixed(*r.heading_deg) : std::string(), to_string(r.direction),
                       to_string(r.lane_change), format_fixed(r.timestamp, 6), format_fixed(r.ground_m.x),
                       format_fixed(r.ground_m.y));
  }
  if (!out) throw IoError("failed to write truth CSV");
}

std::vector<TruthRow> read_truth_csv(std::istream& in) {
  using namespace detail;
  std::int64_t line_no = 0;
  std::vector<TruthRow> rows;
  if (!expect_header(in, kTruthHeader, line_no)) return rows;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto c = split_csv(strip_cr(line));
    if (c.size() != 14) throw ParseError(fmt::format("expected 14 columns, got {}", c.size()), line_no);
    TruthRow r;
    r.frame = parse_int(c[0], line_no, "frame");
    r.id = parse_int(c[1], line_no, "id");
    r.box = {parse_double(c[2], line_no, "x"), parse_double(c[3], line_no, "y"), parse_double(c[4], line_no, "w"),
             parse_double(c[5], line_no, "h")};
    r.speed_mps = parse_double(c[6], line_no, "speed_mps");
    r.acceleration_mps2 = parse_optional(c[7], line_no, "accel_mps2");
    r.heading_deg = parse_optional(c[8], line_no, "heading_deg");
    const auto dir = parse_direction(c[9]);
    if (!dir) throw ParseError(fmt::format("unknown direction \"{}\"", c[9]), line_no);
    r.direction = *dir;
    const auto lc = parse_lane_change(c[10]);
    if (!lc) throw ParseError(fmt::format("unknown lane change \"{}\"", c[10]), line_no);
    r.lane_change = *lc;
    r.timestamp = parse_double(c[11], line_no, "t");
    r.ground_m = {parse_double(c[12], line_no, "x_m"), parse_double(c[13], line_no, "y_m")};
    rows.push_back(r);
  }
  return rows;
}

}  // namespace skytrack
