#include "skytrack/tracker.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "skytrack/error.hpp"
#include "skytrack/hungarian.hpp"

namespace skytrack {

void validate(const TrackerConfig& cfg) {
  if (!(cfg.iou_threshold > 0.0 && cfg.iou_threshold < 1.0)) {
    throw InvalidArgument(fmt::format("iou_threshold must be in (0, 1), got {}", cfg.iou_threshold));
  }
  if (cfg.max_age < 1) throw InvalidArgument(fmt::format("max_age must be >= 1, got {}", cfg.max_age));
  if (cfg.min_hits < 0) throw InvalidArgument(fmt::format("min_hits must be >= 0, got {}", cfg.min_hits));
  if (cfg.history_length < 1) throw InvalidArgument("history_length must be >= 1");
}

const char* to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::Tracked: return "tracked";
    case TrackStatus::Coasting: return "coasting";
  }
  return "unknown";
}

Assignment associate(std::span<const BoxCorners> detections, std::span<const BoxCorners> predicted,
                     double iou_threshold) {
  const int nd = static_cast<int>(detections.size());
  const int nt = static_cast<int>(predicted.size());
  Assignment out;

  CostMatrix cost(nd, nt);
  CostMatrix overlap(nd, nt);
  for (int d = 0; d < nd; ++d) {
    for (int t = 0; t < nt; ++t) {
      overlap(d, t) = iou(detections[d], predicted[t]);
      cost(d, t) = 1.0 - overlap(d, t);
    }
  }

  std::vector<char> det_used(nd, 0);
  std::vector<char> trk_used(nt, 0);
  for (const auto& [d, t] : hungarian_min_cost(cost)) {
    if (overlap(d, t) < iou_threshold) continue;
    out.matches.emplace_back(d, t);
    det_used[d] = 1;
    trk_used[t] = 1;
  }
  for (int d = 0; d < nd; ++d) {
    if (!det_used[d]) out.unmatched_detections.push_back(d);
  }
  for (int t = 0; t < nt; ++t) {
    if (!trk_used[t]) out.unmatched_tracks.push_back(t);
  }
  return out;
}

SortTracker::SortTracker(TrackerConfig cfg) : cfg_(std::move(cfg)) { validate(cfg_); }

void SortTracker::reset() {
  tracks_.clear();
  next_id_ = 1;
  frames_seen_ = 0;
  last_frame_.reset();
}

void SortTracker::push_history(Track& t, std::int64_t frame) const {
  t.history.push_back({frame, t.last_box});
  while (t.history.size() > cfg_.history_length) t.history.pop_front();
}

std::vector<TrackOutput> SortTracker::step(const DetectionFrame& frame) {
  std::vector<BoxCorners> boxes;
  boxes.reserve(frame.boxes.size());
  for (const auto& d : frame.boxes) boxes.push_back(xywh_to_corners(d.box));
  return step(frame.frame, boxes);
}

std::vector<TrackOutput> SortTracker::step(std::int64_t frame_index,
                                           std::span<const BoxCorners> detections) {
  if (last_frame_ && frame_index < *last_frame_) {
    throw OrderingError(
        fmt::format("frame {} arrived after frame {}", frame_index, *last_frame_));
  }
  for (const auto& d : detections) validate(d);
  last_frame_ = frame_index;
  ++frames_seen_;

  // Predict; drop any track whose prediction degenerated.
  std::vector<BoxCorners> predicted;
  predicted.reserve(tracks_.size());
  std::erase_if(tracks_, [&](Track& t) {
    t.kalman = kalman_predict(t.kalman, cfg_.noise);
    ++t.age;
    ++t.time_since_update;
    if (!t.kalman.mean.allFinite()) return true;
    return false;
  });
  for (const auto& t : tracks_) predicted.push_back(state_to_box(t.kalman.mean));

  const Assignment a = associate(detections, predicted, cfg_.iou_threshold);

  for (const auto& [d, ti] : a.matches) {
    Track& t = tracks_[ti];
    t.kalman = kalman_update(t.kalman, detections[d], cfg_.noise);
    ++t.hits;
    t.time_since_update = 0;
    t.last_box = detections[d];
    push_history(t, frame_index);
  }
  for (int ti : a.unmatched_tracks) {
    Track& t = tracks_[ti];
    t.last_box = predicted[ti];
    push_history(t, frame_index);
  }
  for (int d : a.unmatched_detections) {
    Track t;
    t.id = next_id_++;
    t.kalman = kalman_init(detections[d], cfg_.noise);
    t.hits = 1;
    t.age = 1;
    t.time_since_update = 0;
    t.last_box = detections[d];
    push_history(t, frame_index);
    tracks_.push_back(std::move(t));
  }

  std::erase_if(tracks_, [&](const Track& t) { return t.time_since_update > cfg_.max_age; });

  const bool warming_up = frames_seen_ <= cfg_.min_hits;
  std::vector<TrackOutput> out;
  for (const auto& t : tracks_) {
    if (t.hits < cfg_.min_hits && !warming_up) continue;
    out.push_back({t.id, t.last_box,
                   t.time_since_update == 0 ? TrackStatus::Tracked : TrackStatus::Coasting});
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.id < r.id; });
  return out;
}

}  // namespace skytrack
