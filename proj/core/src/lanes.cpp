#include "skytrack/lanes.hpp"

#include <fmt/format.h>

#include "skytrack/error.hpp"

namespace skytrack {

std::array<Point, 4> LaneArea::polygon() const {
  return {Point{rect.x1, rect.y1}, Point{rect.x2, rect.y1}, Point{rect.x2, rect.y2},
          Point{rect.x1, rect.y2}};
}

bool LaneArea::contains(const Point& p) const {
  return p.x >= rect.x1 && p.x < rect.x2 && p.y >= rect.y1 && p.y < rect.y2;
}

std::optional<int> LaneRegions::lane_of(const Point& p) const {
  for (int i = 0; i < kLaneCount; ++i) {
    if (areas[i].contains(p)) return i;
  }
  return std::nullopt;
}

std::string lane_name(int lane) {
  static constexpr const char* kNames[kLaneCount] = {"N_in", "N_out", "S_in", "S_out",
                                                     "E_in", "E_out", "W_in", "W_out"};
  if (lane < 0 || lane >= kLaneCount) throw InvalidArgument(fmt::format("no lane {}", lane));
  return kNames[lane];
}

LaneRegions build_lane_regions(const BoxCorners& c, const ViewSize& frame) {
  validate(frame);
  validate(c);
  const double w = frame.width;
  const double h = frame.height;
  if (!(c.x1 > 0.0 && c.y1 > 0.0 && c.x2 < w && c.y2 < h)) {
    throw InvalidArgument(fmt::format(
        "intersection rectangle ({}, {}, {}, {}) must lie strictly inside the {}x{} frame", c.x1,
        c.y1, c.x2, c.y2, frame.width, frame.height));
  }
  const double mx = 0.5 * (c.x1 + c.x2);
  const double my = 0.5 * (c.y1 + c.y2);

  LaneRegions r;
  r.center = c;
  // Southbound traffic enters from the top and keeps to its right, the screen-left half.
  r.areas[0] = {{c.x1, 0.0, mx, c.y1}, Approach::N, Bound::Inbound};
  r.areas[1] = {{mx, 0.0, c.x2, c.y1}, Approach::N, Bound::Outbound};
  r.areas[2] = {{mx, c.y2, c.x2, h}, Approach::S, Bound::Inbound};
  r.areas[3] = {{c.x1, c.y2, mx, h}, Approach::S, Bound::Outbound};
  r.areas[4] = {{c.x2, c.y1, w, my}, Approach::E, Bound::Inbound};
  r.areas[5] = {{c.x2, my, w, c.y2}, Approach::E, Bound::Outbound};
  r.areas[6] = {{0.0, my, c.x1, c.y2}, Approach::W, Bound::Inbound};
  r.areas[7] = {{0.0, c.y1, c.x1, my}, Approach::W, Bound::Outbound};
  return r;
}

MacroSnapshot macro_snapshot(std::int64_t interval, std::int64_t frame, double timestamp,
                             std::span<const TrackOutput> tracks,
                             std::span<const MicroRecord> micro,
                             const std::optional<LaneRegions>& regions) {
  MacroSnapshot snap;
  snap.interval = interval;
  snap.frame = frame;
  snap.timestamp = timestamp;
  snap.total_vehicles = static_cast<std::int64_t>(tracks.size());

  if (regions) {
    for (const auto& t : tracks) {
      if (auto lane = regions->lane_of(t.box.center())) ++snap.lane_counts[*lane];
    }
  }

  std::array<double, kDirectionCount> speed_sum{};
  for (const auto& m : micro) {
    const int d = static_cast<int>(m.direction);
    ++snap.directions[d].count;
    speed_sum[d] += m.speed_mps;
  }
  for (int d = 0; d < kDirectionCount; ++d) {
    if (snap.directions[d].count > 0) {
      snap.directions[d].mean_speed_mps = speed_sum[d] / static_cast<double>(snap.directions[d].count);
    }
  }
  return snap;
}

}  // namespace skytrack
