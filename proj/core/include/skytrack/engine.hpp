#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "skytrack/analytics.hpp"
#include "skytrack/config.hpp"
#include "skytrack/detection.hpp"
#include "skytrack/io.hpp"
#include "skytrack/lanes.hpp"
#include "skytrack/tracker.hpp"

namespace skytrack {

struct FrameResult {
  std::int64_t frame = 0;
  double timestamp = 0.0;
  std::vector<TrackOutput> tracks;
  std::vector<MicroRecord> micro;
  std::optional<MacroSnapshot> macro;  // set on sampling-interval boundaries
  std::vector<DrawCommand> draw;
};

/// The per-frame processing stage: track, then derive micro records, macro
/// snapshots and overlay commands.
///
/// The rate meter is fed the source-time span between consecutive processed
/// frames, so under frame dropping the sampling interval shrinks with the
/// processed rate and each window still covers time_ratio seconds of video.
/// A new sampling interval takes effect only at an interval boundary.
class Engine {
 public:
  explicit Engine(EngineConfig cfg);

  FrameResult process(const DetectionFrame& frame);

  const EngineConfig& config() const { return cfg_; }
  const DrawingArea& drawing_area() const { return area_; }
  const ScaleModel& scale() const { return scale_; }
  const FpsMeter& meter() const { return meter_; }
  const std::optional<LaneRegions>& lane_regions() const { return regions_; }
  /// Sampling interval in force, once the meter is ready.
  std::optional<int> sampling_interval() const { return sfps_; }

 private:
  EngineConfig cfg_;
  DrawingArea area_;
  ScaleModel scale_;
  std::optional<LaneRegions> regions_;
  SortTracker tracker_;
  MicroEstimator micro_;
  FpsMeter meter_;
  std::optional<double> last_timestamp_;
  std::optional<int> sfps_;
  int frames_in_interval_ = 0;
  std::int64_t interval_ = 0;
};

}  // namespace skytrack
