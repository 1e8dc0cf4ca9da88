#pragma once

// Per-vehicle kinematics from track histories.
//
// Analytics works in a north-positive frame: image dy is negated so that a
// heading of 90 degrees points up the screen. The sampling window SFPS is
// derived from the measured processing rate, so every window spans
// time_ratio seconds of processed video.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "skytrack/geometry.hpp"
#include "skytrack/tracker.hpp"

namespace skytrack {

/// Processing-rate meter: frames / accumulated processing time. Durations
/// are accumulated in integer nanoseconds so the result does not depend on
/// the order in which they were recorded.
class FpsMeter {
 public:
  /// Throws OrderingError when end < start.
  void record(double start_s, double end_s);

  std::int64_t frames() const { return frames_; }
  double time_all() const { return static_cast<double>(time_all_ns_) * 1e-9; }
  bool ready() const { return frames_ > 0 && time_all_ns_ > 0; }

  /// Throws NotReady until at least one non-zero duration was recorded.
  double fps() const;

 private:
  std::int64_t frames_ = 0;
  std::int64_t time_all_ns_ = 0;
};

struct SamplingConfig {
  double time_ratio = 1.0;  // seconds per sampling window
};

/// round(fps * time_ratio), at least 1. Throws NotReady if the meter is not ready.
int sampling_interval(const FpsMeter& meter, const SamplingConfig& cfg);

/// Euclidean distance in pixels between the box centers.
double pixel_step(const BoxCorners& prev, const BoxCorners& cur);

/// Path length of the last `sfps` per-frame steps in meters. Throws NotReady
/// if fewer than sfps steps are available.
double real_distance(std::span<const double> steps, int sfps, const ScaleModel& scale);

double speed(double real_distance_m, const SamplingConfig& cfg);
double acceleration(double speed_now, double speed_prev_interval, const SamplingConfig& cfg);

/// atan2(dy, dx) in degrees, in (-180, 180]. nullopt for a zero displacement.
std::optional<double> heading(double dx, double dy);

enum class Direction { E, NE, N, NW, W, SW, S, SE, Stationary };

inline constexpr int kDirectionCount = 9;

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);
bool is_cardinal(Direction d);

/// Nominal heading of a moving direction in degrees (E = 0, N = 90).
double direction_center_deg(Direction d);

/// 45-degree bins centered on the compass points, half-open at the lower edge.
/// Below stationary_eps the vehicle is Stationary.
Direction classify_direction(double heading_deg, double speed_mps, double stationary_eps);

enum class LaneChange { None, Left, Right, Turn };

std::string_view to_string(LaneChange c);
std::optional<LaneChange> parse_lane_change(std::string_view s);

struct LaneChangeParams {
  double threshold_m = 2.0;
  double lateral_fraction = 0.5;  // lateral shift must exceed this * threshold
  bool literal = false;           // gross endpoint distance only, no lateral test
};

/// Endpoints of one sampling window, in image pixels.
struct WindowEndpoints {
  Point start;
  Point end;
  Direction dir_start = Direction::Stationary;
  Direction dir_end = Direction::Stationary;
  std::optional<double> heading_start_deg;  // travel reference; falls back to dir_start
};

/// Turn when both directions are cardinal and differ; otherwise left/right by
/// the side of the travel reference the window moved to, once both the
/// endpoint distance and its lateral part clear their thresholds.
LaneChange detect_lane_change(const WindowEndpoints& w, const LaneChangeParams& params,
                              const ScaleModel& scale);

struct MicroRecord {
  std::int64_t track_id = 0;
  std::int64_t frame = 0;
  BoxXYWH box;
  double speed_mps = 0.0;
  std::optional<double> acceleration_mps2;
  std::optional<double> heading_deg;
  Direction direction = Direction::Stationary;
  LaneChange lane_change = LaneChange::None;
};

struct AnalyticsConfig {
  SamplingConfig sampling;
  double stationary_eps_mps = 0.2;
  LaneChangeParams lane_change;
};

/// Keeps a short per-track history and turns each frame's tracks into micro
/// records. A track needs sfps steps of uninterrupted history before it gets
/// a record; acceleration and lane changes need a second window. A maneuver
/// is flagged once, on the record where its run of flagged windows ends.
class MicroEstimator {
 public:
  explicit MicroEstimator(AnalyticsConfig cfg = {});

  /// sfps == 0 accumulates history without emitting records.
  std::vector<MicroRecord> update(std::int64_t frame, std::span<const TrackOutput> tracks, int sfps,
                                  const ScaleModel& scale);

  const AnalyticsConfig& config() const { return cfg_; }

 private:
  struct Sample {
    Point center;
    double step = 0.0;
    std::optional<double> speed;
    std::optional<double> heading;
    std::optional<Direction> direction;
  };
  struct TrackState {
    std::deque<Sample> samples;
    std::int64_t last_seq = -1;
    std::optional<LaneChange> maneuver;  // open run of flagged windows
    bool ignoring = false;               // open run started inside the quiet period
    std::int64_t quiet_until = 0;
  };

  AnalyticsConfig cfg_;
  std::map<std::int64_t, TrackState> tracks_;
  std::int64_t seq_ = 0;
};

}  // namespace skytrack
