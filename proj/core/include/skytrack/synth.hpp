#pragma once

// Synthetic top-down traffic scenarios with exact ground truth.
//
// Ground coordinates are meters with the origin at the image center, x east
// and y north. Vehicles follow piecewise-linear paths at a constant speed
// (optionally accelerating) and are seen as the axis-aligned bounding box of
// their rotated footprint. Detections add Gaussian center jitter, Bernoulli
// misses and Poisson false positives; every random draw comes from a seeded
// 64-bit Mersenne Twister with hand-rolled distributions, so output is
// identical across standard libraries.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skytrack/analytics.hpp"
#include "skytrack/detection.hpp"
#include "skytrack/geometry.hpp"

namespace skytrack {

struct Maneuver {
  double time_s = 0.0;
  LaneChange kind = LaneChange::None;
};

struct Occlusion {
  double start_s = 0.0;  // inclusive
  double end_s = 0.0;    // exclusive
};

struct VehicleSpec {
  std::int64_t id = 0;
  std::vector<Point> waypoints_m;
  double speed_mps = 10.0;
  double accel_mps2 = 0.0;
  double start_time_s = 0.0;
  double length_m = 4.5;
  double width_m = 1.8;
  std::vector<Maneuver> maneuvers;    // ground-truth lane-change / turn events
  std::vector<Occlusion> occlusions;  // windows with no detection
};

struct NoiseSpec {
  double position_sigma_px = 0.0;
  double miss_probability = 0.0;
  double false_positive_rate = 0.0;  // mean false boxes per frame
  std::uint64_t seed = 1;
};

struct Scenario {
  std::string name;
  double duration_s = 10.0;
  double fps = 30.0;
  ViewSize image{1920, 1080};
  CameraGeometry camera{100.0, 83.0};
  std::vector<VehicleSpec> vehicles;
  NoiseSpec noise;
};

/// Throws InvalidArgument naming the offending vehicle or field, including
/// waypoints outside the camera footprint.
void validate(const Scenario& s);

ScaleModel scenario_scale(const Scenario& s);
Point ground_to_pixel(const Point& ground_m, const ScaleModel& scale, const ViewSize& image);

struct TruthRow {
  std::int64_t frame = 0;
  std::int64_t id = 0;
  BoxXYWH box;
  double speed_mps = 0.0;
  std::optional<double> acceleration_mps2;
  std::optional<double> heading_deg;
  Direction direction = Direction::Stationary;
  LaneChange lane_change = LaneChange::None;
  double timestamp = 0.0;
  Point ground_m;
};

struct SynthOutput {
  std::int64_t frame_count = 0;
  std::vector<TruthRow> truth;
  std::vector<DetectionFrame> detections;  // one per frame, possibly empty
};

SynthOutput generate(const Scenario& s);

std::vector<std::string> preset_names();
/// Throws InvalidArgument for an unknown name.
Scenario preset(std::string_view name);

/// Scenario files use the same strict JSON conventions as the engine config.
Scenario parse_scenario(std::string_view json_text);
std::string scenario_to_json(const Scenario& s);

inline constexpr std::string_view kTruthHeader =
    "frame,id,x,y,w,h,speed_mps,accel_mps2,heading_deg,direction,lane_change,t,x_m,y_m";

void write_truth_csv(std::ostream& out, std::span<const TruthRow> rows);
std::vector<TruthRow> read_truth_csv(std::istream& in);

}  // namespace skytrack
