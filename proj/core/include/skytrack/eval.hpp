#pragma once

// Detection and tracking quality against ground truth: per-frame IoU
// matching, confusion counts, precision/recall/F1 and identity switches.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skytrack/geometry.hpp"
#include "skytrack/io.hpp"
#include "skytrack/synth.hpp"

namespace skytrack {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Percentages.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Throws UndefinedMetric when tp+fp or tp+fn is zero, InvalidArgument on
/// negative counts.
Prf prf(const ConfusionCounts& c);

struct LabeledBox {
  std::int64_t id = 0;
  BoxXYWH box;
};

struct FrameBoxes {
  std::int64_t frame = 0;
  double timestamp = 0.0;
  std::vector<LabeledBox> boxes;
};

struct FrameMatch {
  ConfusionCounts counts;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;  // (truth id, predicted id)
};

/// Optimal one-to-one matching on IoU; pairs below iou_min do not count.
FrameMatch match_frame(std::span<const LabeledBox> truth, std::span<const LabeledBox> pred, double iou_min = 0.5);

/// Sums match_frame over frames. Frames are paired by index; a frame missing
/// on one side counts as empty there. Throws AlignmentError when the same
/// index carries different timestamps or a side repeats an index.
ConfusionCounts match_and_count(std::span<const FrameBoxes> truth, std::span<const FrameBoxes> pred,
                                double iou_min = 0.5);

/// Counts the times a truth id's matched predicted id differs from its
/// previous match. `frames` holds the matched pairs of each frame in order.
std::int64_t id_switches(std::span<const std::vector<std::pair<std::int64_t, std::int64_t>>> frames);

struct EvalOptions {
  double iou_min = 0.5;
  double bucket_s = 15.0;
};

struct BucketReport {
  std::int64_t index = 0;
  double start_s = 0.0;
  ConfusionCounts counts;
  std::optional<Prf> metrics;  // absent when undefined
};

struct EvalReport {
  ConfusionCounts total;
  std::optional<Prf> metrics;
  std::int64_t id_switches = 0;
  std::int64_t frames = 0;
  std::vector<BucketReport> buckets;
};

EvalReport evaluate(std::span<const FrameBoxes> truth, std::span<const FrameBoxes> pred,
                    const EvalOptions& options = {});

/// Grouping helpers; output is sorted by frame.
std::vector<FrameBoxes> frames_from_truth(std::span<const TruthRow> rows);
std::vector<FrameBoxes> frames_from_tracks(std::span<const TrackRow> rows);
std::vector<FrameBoxes> frames_from_detections(std::span<const DetectionFrame> frames);

/// Plain-text report, one "key value" pair per line.
std::string format_report(const EvalReport& r);
std::string format_prf(const ConfusionCounts& c, const Prf& p);

}  // namespace skytrack
