#pragma once

// SORT multi-object tracker: Kalman prediction, Hungarian IoU association,
// and a spawn / coast / reap track life cycle.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "skytrack/detection.hpp"
#include "skytrack/geometry.hpp"
#include "skytrack/kalman.hpp"

namespace skytrack {

struct TrackerConfig {
  double iou_threshold = 0.3;
  int max_age = 3;   // frames a track may coast without a match
  int min_hits = 1;  // matches before a track is reported
  std::size_t history_length = 64;
  KalmanNoise noise;
};

void validate(const TrackerConfig& cfg);

struct Assignment {
  std::vector<std::pair<int, int>> matches;  // (detection, track)
  std::vector<int> unmatched_detections;
  std::vector<int> unmatched_tracks;
};

/// Cost 1 - IoU solved optimally; pairs below iou_threshold are split back
/// into the unmatched lists. All lists are sorted ascending.
Assignment associate(std::span<const BoxCorners> detections, std::span<const BoxCorners> predicted,
                     double iou_threshold);

enum class TrackStatus {
  Tracked,   // matched a detection this frame; box is the detection
  Coasting,  // unmatched this frame; box is the Kalman prediction
};

const char* to_string(TrackStatus s);

struct TrackOutput {
  std::int64_t id = 0;
  BoxCorners box;
  TrackStatus status = TrackStatus::Tracked;

  friend bool operator==(const TrackOutput&, const TrackOutput&) = default;
};

struct HistoryEntry {
  std::int64_t frame = 0;
  BoxCorners box;
};

struct Track {
  std::int64_t id = 0;
  KalmanBoxState kalman;
  int hits = 0;
  int time_since_update = 0;
  int age = 0;
  BoxCorners last_box;
  std::deque<HistoryEntry> history;  // most recent last, bounded by history_length
};

class SortTracker {
 public:
  explicit SortTracker(TrackerConfig cfg = {});

  /// Runs predict, associate, update, spawn and reap for one frame. Returns
  /// the reported tracks sorted by id. Throws OrderingError when the frame
  /// index goes backwards.
  std::vector<TrackOutput> step(const DetectionFrame& frame);
  std::vector<TrackOutput> step(std::int64_t frame_index, std::span<const BoxCorners> detections);

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return cfg_; }
  std::int64_t frames_seen() const { return frames_seen_; }
  std::int64_t next_id() const { return next_id_; }

  void reset();

 private:
  void push_history(Track& t, std::int64_t frame) const;

  TrackerConfig cfg_;
  std::vector<Track> tracks_;
  std::int64_t next_id_ = 1;
  std::int64_t frames_seen_ = 0;
  std::optional<std::int64_t> last_frame_;
};

}  // namespace skytrack
