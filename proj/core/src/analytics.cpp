#include "skytrack/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "skytrack/error.hpp"

namespace skytrack {

namespace {

constexpr std::array<std::string_view, kDirectionCount> kDirectionNames = {
    "E", "NE", "N", "NW", "W", "SW", "S", "SE", "STATIONARY"};

constexpr std::array<std::string_view, 4> kLaneChangeNames = {"none", "left", "right", "turn"};

// History kept while the sampling interval is still unknown.
constexpr std::size_t kUnsampledHistory = 1024;

double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace

void FpsMeter::record(double start_s, double end_s) {
  if (!(end_s >= start_s)) {
    throw OrderingError(fmt::format("clock error: end {} precedes start {}", end_s, start_s));
  }
  ++frames_;
  time_all_ns_ += std::llround((end_s - start_s) * 1e9);
}

double FpsMeter::fps() const {
  if (!ready()) throw NotReady("fps is undefined before any processing time was recorded");
  return static_cast<double>(frames_) / time_all();
}

int sampling_interval(const FpsMeter& meter, const SamplingConfig& cfg) {
  if (!(cfg.time_ratio > 0.0)) {
    throw InvalidArgument(fmt::format("time_ratio must be positive, got {}", cfg.time_ratio));
  }
  const double sfps = std::round(meter.fps() * cfg.time_ratio);
  return std::max(1, static_cast<int>(sfps));
}

double pixel_step(const BoxCorners& prev, const BoxCorners& cur) {
  return distance(prev.center(), cur.center());
}

double real_distance(std::span<const double> steps, int sfps, const ScaleModel& scale) {
  if (sfps < 1) throw InvalidArgument(fmt::format("sampling interval must be >= 1, got {}", sfps));
  if (steps.size() < static_cast<std::size_t>(sfps)) {
    throw NotReady(fmt::format("need {} steps of history, have {}", sfps, steps.size()));
  }
  const auto window = steps.last(static_cast<std::size_t>(sfps));
  return std::accumulate(window.begin(), window.end(), 0.0) * scale.meters_per_pixel;
}

double speed(double real_distance_m, const SamplingConfig& cfg) {
  return real_distance_m / cfg.time_ratio;
}

double acceleration(double speed_now, double speed_prev_interval, const SamplingConfig& cfg) {
  return (speed_now - speed_prev_interval) / cfg.time_ratio;
}

std::optional<double> heading(double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) return std::nullopt;
  double deg = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
  if (deg <= -180.0) deg += 360.0;
  return deg;
}

std::string_view to_string(Direction d) { return kDirectionNames[static_cast<int>(d)]; }

std::optional<Direction> parse_direction(std::string_view s) {
  for (int i = 0; i < kDirectionCount; ++i) {
    if (kDirectionNames[i] == s) return static_cast<Direction>(i);
  }
  return std::nullopt;
}

bool is_cardinal(Direction d) {
  return d == Direction::N || d == Direction::E || d == Direction::S || d == Direction::W;
}

double direction_center_deg(Direction d) {
  if (d == Direction::Stationary) throw InvalidArgument("stationary has no heading");
  const double deg = 45.0 * static_cast<int>(d);
  return deg > 180.0 ? deg - 360.0 : deg;
}

Direction classify_direction(double heading_deg, double speed_mps, double stationary_eps) {
  if (speed_mps < stationary_eps || !std::isfinite(heading_deg)) return Direction::Stationary;
  const double bin = std::floor((heading_deg + 22.5) / 45.0);
  const int idx = ((static_cast<int>(bin) % 8) + 8) % 8;
  return static_cast<Direction>(idx);
}

std::string_view to_string(LaneChange c) { return kLaneChangeNames[static_cast<int>(c)]; }

std::optional<LaneChange> parse_lane_change(std::string_view s) {
  for (int i = 0; i < 4; ++i) {
    if (kLaneChangeNames[i] == s) return static_cast<LaneChange>(i);
  }
  return std::nullopt;
}

LaneChange detect_lane_change(const WindowEndpoints& w, const LaneChangeParams& params,
                              const ScaleModel& scale) {
  if (w.dir_start == Direction::Stationary || w.dir_end == Direction::Stationary) {
    return LaneChange::None;
  }
  // North-positive displacement in meters.
  const double east = (w.end.x - w.start.x) * scale.meters_per_pixel;
  const double north = -(w.end.y - w.start.y) * scale.meters_per_pixel;
  if (std::hypot(east, north) <= params.threshold_m) return LaneChange::None;

  if (w.dir_start != w.dir_end && is_cardinal(w.dir_start) && is_cardinal(w.dir_end)) {
    return LaneChange::Turn;
  }

  const double ref_deg = w.heading_start_deg.value_or(direction_center_deg(w.dir_start));
  const double ref = ref_deg * std::numbers::pi / 180.0;
  // Positive lateral means displaced to the left of the travel direction.
  const double lateral = std::cos(ref) * north - std::sin(ref) * east;
  if (!params.literal && std::abs(lateral) <= params.lateral_fraction * params.threshold_m) {
    return LaneChange::None;
  }
  if (lateral > 0.0) return LaneChange::Left;
  if (lateral < 0.0) return LaneChange::Right;
  return LaneChange::None;
}

MicroEstimator::MicroEstimator(AnalyticsConfig cfg) : cfg_(cfg) {
  if (!(cfg_.sampling.time_ratio > 0.0)) throw InvalidArgument("time_ratio must be positive");
  if (!(cfg_.lane_change.threshold_m > 0.0)) throw InvalidArgument("lane change threshold must be positive");
  if (!(cfg_.stationary_eps_mps >= 0.0)) throw InvalidArgument("stationary epsilon must be >= 0");
}

std::vector<MicroRecord> MicroEstimator::update(std::int64_t frame, std::span<const TrackOutput> tracks,
                                                int sfps, const ScaleModel& scale) {
  ++seq_;
  std::vector<MicroRecord> out;
  std::set<std::int64_t> present;

  for (const TrackOutput& t : tracks) {
    present.insert(t.id);
    TrackState& st = tracks_[t.id];
    if (st.last_seq != seq_ - 1) st = TrackState{};
    st.last_seq = seq_;

    Sample sample;
    sample.center = t.box.center();
    if (!st.samples.empty()) sample.step = distance(st.samples.back().center, sample.center);
    st.samples.push_back(sample);

    const std::size_t n = st.samples.size();
    if (sfps > 0 && n > static_cast<std::size_t>(sfps)) {
      std::vector<double> steps;
      steps.reserve(sfps);
      for (std::size_t i = n - sfps; i < n; ++i) steps.push_back(st.samples[i].step);
      const double v = speed(real_distance(steps, sfps, scale), cfg_.sampling);

      const Sample& start = st.samples[n - 1 - sfps];
      const Point& end = st.samples.back().center;
      const auto hd = heading(end.x - start.center.x, -(end.y - start.center.y));
      const Direction dir =
          hd ? classify_direction(*hd, v, cfg_.stationary_eps_mps) : Direction::Stationary;

      MicroRecord rec;
      rec.track_id = t.id;
      rec.frame = frame;
      rec.box = corners_to_xywh(t.box);
      rec.speed_mps = v;
      rec.direction = dir;
      if (dir != Direction::Stationary) rec.heading_deg = hd;
      if (start.speed) rec.acceleration_mps2 = acceleration(v, *start.speed, cfg_.sampling);

      LaneChange raw = LaneChange::None;
      if (start.direction) {
        raw = detect_lane_change({start.center, end, *start.direction, dir, start.heading},
                                 cfg_.lane_change, scale);
      }
      // One event per maneuver, reported when its run of flagged windows
      // ends: a turn anywhere in the run wins, otherwise the first lateral
      // side. Runs that start while the travel reference still overlaps the
      // last maneuver are its after-image (a lane change reads as an
      // opposite shift once the vehicle straightens out) and are skipped.
      if (raw != LaneChange::None) {
        if (st.maneuver) {
          if (raw == LaneChange::Turn) st.maneuver = raw;
        } else if (!st.ignoring) {
          if (seq_ < st.quiet_until) {
            st.ignoring = true;
          } else {
            st.maneuver = raw;
          }
        }
      } else {
        if (st.maneuver) {
          rec.lane_change = *st.maneuver;
          st.maneuver.reset();
          st.quiet_until = seq_ + 2 * sfps;
        }
        st.ignoring = false;
      }

      Sample& back = st.samples.back();
      back.speed = v;
      back.heading = rec.heading_deg;
      back.direction = dir;
      out.push_back(rec);
    }

    const std::size_t keep =
        sfps > 0 ? 2 * static_cast<std::size_t>(sfps) + 2 : kUnsampledHistory;
    while (st.samples.size() > keep) st.samples.pop_front();
  }

  std::erase_if(tracks_, [&](const auto& kv) { return !present.contains(kv.first); });
  return out;
}

}  // namespace skytrack
