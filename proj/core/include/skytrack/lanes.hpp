#pragma once

// Eight lane areas around a user-drawn intersection rectangle, and the
// per-interval macro statistics counted over them.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skytrack/analytics.hpp"
#include "skytrack/geometry.hpp"
#include "skytrack/tracker.hpp"

namespace skytrack {

enum class Approach { N, S, E, W };
enum class Bound { Inbound, Outbound };

struct LaneArea {
  BoxCorners rect;
  Approach approach = Approach::N;
  Bound bound = Bound::Inbound;

  /// Corner polygon, clockwise from the top-left.
  std::array<Point, 4> polygon() const;
  /// Half-open containment [x1, x2) x [y1, y2), so adjacent areas never share a point.
  bool contains(const Point& p) const;
};

inline constexpr int kLaneCount = 8;

/// Order: N-in, N-out, S-in, S-out, E-in, E-out, W-in, W-out.
struct LaneRegions {
  BoxCorners center;
  std::array<LaneArea, kLaneCount> areas;

  std::optional<int> lane_of(const Point& p) const;
};

std::string lane_name(int lane);

/// Each arm spans from a rectangle edge to the frame border and is split on
/// its midline into two directional halves (right-hand traffic). Throws
/// InvalidArgument if the rectangle touches or leaves the frame.
LaneRegions build_lane_regions(const BoxCorners& center, const ViewSize& frame);

struct DirectionStat {
  std::int64_t count = 0;
  double mean_speed_mps = 0.0;
};

struct MacroSnapshot {
  std::int64_t interval = 0;
  std::int64_t frame = 0;
  double timestamp = 0.0;
  std::int64_t total_vehicles = 0;
  std::array<std::int64_t, kLaneCount> lane_counts{};
  std::array<DirectionStat, kDirectionCount> directions{};
};

/// Counts tracks by lane (center-point containment) and micro records by
/// direction. Lane counts stay zero when no regions are configured.
MacroSnapshot macro_snapshot(std::int64_t interval, std::int64_t frame, double timestamp,
                             std::span<const TrackOutput> tracks,
                             std::span<const MicroRecord> micro,
                             const std::optional<LaneRegions>& regions);

}  // namespace skytrack
