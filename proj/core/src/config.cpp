#include "skytrack/config.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "skytrack/lanes.hpp"

namespace skytrack {

using detail::json;

namespace {

ViewSize read_size(const json& root, const char* section, ViewSize fallback) {
  if (!root.contains(section)) return fallback;
  const json& s = root.at(section);
  detail::check_keys(s, section, {"width", "height"});
  return {static_cast<int>(detail::get_integer(s, section, "width", fallback.width)),
          static_cast<int>(detail::get_integer(s, section, "height", fallback.height))};
}

void read_noise(const json& s, KalmanNoise& n) {
  constexpr const char* kSec = "tracker.noise";
  detail::check_keys(s, kSec,
                     {"init_position_var", "init_velocity_var", "process_position_var",
                      "process_velocity_var", "process_area_velocity_var", "measurement_center_var",
                      "measurement_shape_var"});
  n.init_position_var = detail::get_number(s, kSec, "init_position_var", n.init_position_var);
  n.init_velocity_var = detail::get_number(s, kSec, "init_velocity_var", n.init_velocity_var);
  n.process_position_var = detail::get_number(s, kSec, "process_position_var", n.process_position_var);
  n.process_velocity_var = detail::get_number(s, kSec, "process_velocity_var", n.process_velocity_var);
  n.process_area_velocity_var =
      detail::get_number(s, kSec, "process_area_velocity_var", n.process_area_velocity_var);
  n.measurement_center_var =
      detail::get_number(s, kSec, "measurement_center_var", n.measurement_center_var);
  n.measurement_shape_var = detail::get_number(s, kSec, "measurement_shape_var", n.measurement_shape_var);
}

}  // namespace

void validate(const EngineConfig& cfg) {
  validate(cfg.camera);
  validate(cfg.video);
  validate(cfg.view);
  validate(cfg.tracker);
  if (!(cfg.analytics.sampling.time_ratio > 0.0)) throw InvalidArgument("sampling.time_ratio must be > 0");
  if (!(cfg.analytics.lane_change.threshold_m > 0.0)) {
    throw InvalidArgument("analytics.lane_change_threshold_m must be > 0");
  }
  if (!(cfg.analytics.stationary_eps_mps >= 0.0)) {
    throw InvalidArgument("analytics.stationary_eps_mps must be >= 0");
  }
  if (cfg.capacity < 1) throw InvalidArgument("pipeline.capacity must be >= 1");
  if (cfg.lane_center) build_lane_regions(*cfg.lane_center, cfg.video);  // throws on a degenerate arm
}

EngineConfig parse_engine_config(std::string_view text) {
  const json root = detail::parse_json(text, "config");
  detail::check_keys(root, "config",
                     {"camera", "video", "view", "tracker", "sampling", "analytics", "lanes", "pipeline"});
  EngineConfig cfg;

  if (root.contains("camera")) {
    const json& s = root.at("camera");
    detail::check_keys(s, "camera", {"fov_deg", "altitude_m"});
    cfg.camera.lens_angle_deg = detail::get_number(s, "camera", "fov_deg", cfg.camera.lens_angle_deg);
    cfg.camera.altitude_m = detail::get_number(s, "camera", "altitude_m", cfg.camera.altitude_m);
  }
  cfg.video = read_size(root, "video", cfg.video);
  cfg.view = read_size(root, "view", cfg.view);

  if (root.contains("tracker")) {
    const json& s = root.at("tracker");
    detail::check_keys(s, "tracker", {"iou_threshold", "max_age", "min_hits", "noise"});
    cfg.tracker.iou_threshold = detail::get_number(s, "tracker", "iou_threshold", cfg.tracker.iou_threshold);
    cfg.tracker.max_age = static_cast<int>(detail::get_integer(s, "tracker", "max_age", cfg.tracker.max_age));
    cfg.tracker.min_hits =
        static_cast<int>(detail::get_integer(s, "tracker", "min_hits", cfg.tracker.min_hits));
    if (s.contains("noise")) read_noise(s.at("noise"), cfg.tracker.noise);
  }
  if (root.contains("sampling")) {
    const json& s = root.at("sampling");
    detail::check_keys(s, "sampling", {"time_ratio"});
    cfg.analytics.sampling.time_ratio =
        detail::get_number(s, "sampling", "time_ratio", cfg.analytics.sampling.time_ratio);
  }
  if (root.contains("analytics")) {
    const json& s = root.at("analytics");
    detail::check_keys(s, "analytics",
                       {"lane_change_threshold_m", "stationary_eps_mps", "distance_only", "lateral_fraction"});
    auto& a = cfg.analytics;
    a.lane_change.threshold_m =
        detail::get_number(s, "analytics", "lane_change_threshold_m", a.lane_change.threshold_m);
    a.lane_change.lateral_fraction =
        detail::get_number(s, "analytics", "lateral_fraction", a.lane_change.lateral_fraction);
    a.lane_change.literal = detail::get_bool(s, "analytics", "distance_only", a.lane_change.literal);
    a.stationary_eps_mps = detail::get_number(s, "analytics", "stationary_eps_mps", a.stationary_eps_mps);
  }
  if (root.contains("lanes")) {
    const json& s = root.at("lanes");
    detail::check_keys(s, "lanes", {"center"});
    if (s.contains("center") && !s.at("center").is_null()) {
      const json& c = s.at("center");
      if (!c.is_array() || c.size() != 4 ||
          !std::all_of(c.begin(), c.end(), [](const json& v) { return v.is_number(); })) {
        throw ParseError("\"lanes.center\" must be [x1, y1, x2, y2]");
      }
      cfg.lane_center = BoxCorners{c[0].get<double>(), c[1].get<double>(), c[2].get<double>(),
                                   c[3].get<double>()};
    }
  }
  if (root.contains("pipeline")) {
    const json& s = root.at("pipeline");
    detail::check_keys(s, "pipeline", {"capacity"});
    const auto cap = detail::get_integer(s, "pipeline", "capacity", static_cast<std::int64_t>(cfg.capacity));
    if (cap < 1) throw InvalidArgument("pipeline.capacity must be >= 1");
    cfg.capacity = static_cast<std::size_t>(cap);
  }
  validate(cfg);
  return cfg;
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config file {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_engine_config(ss.str());
}

std::string engine_config_to_json(const EngineConfig& cfg) {
  json j;
  j["camera"] = {{"fov_deg", cfg.camera.lens_angle_deg}, {"altitude_m", cfg.camera.altitude_m}};
  j["video"] = {{"width", cfg.video.width}, {"height", cfg.video.height}};
  j["view"] = {{"width", cfg.view.width}, {"height", cfg.view.height}};
  const auto& n = cfg.tracker.noise;
  j["tracker"] = {{"iou_threshold", cfg.tracker.iou_threshold},
                  {"max_age", cfg.tracker.max_age},
                  {"min_hits", cfg.tracker.min_hits},
                  {"noise",
                   {{"init_position_var", n.init_position_var},
                    {"init_velocity_var", n.init_velocity_var},
                    {"process_position_var", n.process_position_var},
                    {"process_velocity_var", n.process_velocity_var},
                    {"process_area_velocity_var", n.process_area_velocity_var},
                    {"measurement_center_var", n.measurement_center_var},
                    {"measurement_shape_var", n.measurement_shape_var}}}};
  j["sampling"] = {{"time_ratio", cfg.analytics.sampling.time_ratio}};
  j["analytics"] = {{"lane_change_threshold_m", cfg.analytics.lane_change.threshold_m},
                    {"lateral_fraction", cfg.analytics.lane_change.lateral_fraction},
                    {"distance_only", cfg.analytics.lane_change.literal},
                    {"stationary_eps_mps", cfg.analytics.stationary_eps_mps}};
  if (cfg.lane_center) {
    const auto& c = *cfg.lane_center;
    j["lanes"] = {{"center", {c.x1, c.y1, c.x2, c.y2}}};
  } else {
    j["lanes"] = {{"center", nullptr}};
  }
  j["pipeline"] = {{"capacity", cfg.capacity}};
  return j.dump(2);
}

}  // namespace skytrack
