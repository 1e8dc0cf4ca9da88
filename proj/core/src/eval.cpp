#include "skytrack/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "skytrack/error.hpp"
#include "skytrack/hungarian.hpp"

namespace skytrack {

namespace {

constexpr double kTimeTolerance = 1e-3;

std::map<std::int64_t, const FrameBoxes*> index_frames(std::span<const FrameBoxes> frames, const char* side) {
  std::map<std::int64_t, const FrameBoxes*> out;
  for (const auto& f : frames) {
    if (!out.emplace(f.frame, &f).second) {
      throw AlignmentError(fmt::format("{} repeats frame {}", side, f.frame));
    }
  }
  return out;
}

struct AlignedFrame {
  std::int64_t frame;
  double timestamp;
  std::span<const LabeledBox> truth;
  std::span<const LabeledBox> pred;
};

std::vector<AlignedFrame> align(std::span<const FrameBoxes> truth, std::span<const FrameBoxes> pred) {
  const auto t = index_frames(truth, "truth");
  const auto p = index_frames(pred, "prediction");
  std::vector<AlignedFrame> out;
  auto ti = t.begin();
  auto pi = p.begin();
  while (ti != t.end() || pi != p.end()) {
    if (pi == p.end() || (ti != t.end() && ti->first < pi->first)) {
      out.push_back({ti->first, ti->second->timestamp, ti->second->boxes, {}});
      ++ti;
    } else if (ti == t.end() || pi->first < ti->first) {
      out.push_back({pi->first, pi->second->timestamp, {}, pi->second->boxes});
      ++pi;
    } else {
      if (std::abs(ti->second->timestamp - pi->second->timestamp) > kTimeTolerance) {
        throw AlignmentError(fmt::format("frame {} has t={} in truth but t={} in predictions", ti->first,
                                         ti->second->timestamp, pi->second->timestamp));
      }
      out.push_back({ti->first, ti->second->timestamp, ti->second->boxes, pi->second->boxes});
      ++ti;
      ++pi;
    }
  }
  return out;
}

template <class Row, class IdOf>
std::vector<FrameBoxes> group(std::span<const Row> rows, IdOf id_of) {
  std::map<std::int64_t, FrameBoxes> by_frame;
  for (const auto& r : rows) {
    auto [it, fresh] = by_frame.try_emplace(r.frame);
    if (fresh) {
      it->second.frame = r.frame;
      it->second.timestamp = r.timestamp;
    }
    it->second.boxes.push_back({id_of(r), r.box});
  }
  std::vector<FrameBoxes> out;
  out.reserve(by_frame.size());
  for (auto& [k, v] : by_frame) out.push_back(std::move(v));
  return out;
}

std::string metric_or_undefined(const std::optional<Prf>& m, double Prf::*field) {
  return m ? fmt::format("{:.2f}", (*m).*field) : std::string("undefined");
}

}  // namespace

Prf prf(const ConfusionCounts& c) {
  if (c.tp < 0 || c.fp < 0 || c.fn < 0) throw InvalidArgument("confusion counts must be non-negative");
  if (c.tp + c.fp == 0) throw UndefinedMetric("precision is undefined with no predictions");
  if (c.tp + c.fn == 0) throw UndefinedMetric("recall is undefined with no ground truth");
  const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  return {100.0 * p, 100.0 * r, 100.0 * f1};
}

FrameMatch match_frame(std::span<const LabeledBox> truth, std::span<const LabeledBox> pred, double iou_min) {
  FrameMatch m;
  if (truth.empty() || pred.empty()) {
    m.counts = {0, static_cast<std::int64_t>(pred.size()), static_cast<std::int64_t>(truth.size())};
    return m;
  }
  const auto rows = static_cast<Eigen::Index>(truth.size());
  const auto cols = static_cast<Eigen::Index>(pred.size());
  Eigen::MatrixXd overlap(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const BoxCorners t = xywh_to_corners(truth[static_cast<std::size_t>(i)].box);
    for (Eigen::Index j = 0; j < cols; ++j) {
      overlap(i, j) = iou(t, xywh_to_corners(pred[static_cast<std::size_t>(j)].box));
    }
  }
  // The threshold is applied to the IoU itself; 1 - (1 - v) can round below v.
  const CostMatrix cost = 1.0 - overlap.array();
  for (const auto& [i, j] : hungarian_min_cost(cost)) {
    if (overlap(i, j) >= iou_min) {
      ++m.counts.tp;
      m.pairs.emplace_back(truth[static_cast<std::size_t>(i)].id, pred[static_cast<std::size_t>(j)].id);
    }
  }
  m.counts.fp = static_cast<std::int64_t>(pred.size()) - m.counts.tp;
  m.counts.fn = static_cast<std::int64_t>(truth.size()) - m.counts.tp;
  return m;
}

ConfusionCounts match_and_count(std::span<const FrameBoxes> truth, std::span<const FrameBoxes> pred,
                                double iou_min) {
  ConfusionCounts total;
  for (const auto& f : align(truth, pred)) total += match_frame(f.truth, f.pred, iou_min).counts;
  return total;
}

std::int64_t id_switches(std::span<const std::vector<std::pair<std::int64_t, std::int64_t>>> frames) {
  std::map<std::int64_t, std::int64_t> last;
  std::int64_t switches = 0;
  for (const auto& pairs : frames) {
    for (const auto& [truth_id, pred_id] : pairs) {
      auto [it, fresh] = last.try_emplace(truth_id, pred_id);
      if (!fresh && it->second != pred_id) {
        ++switches;
        it->second = pred_id;
      }
    }
  }
  return switches;
}

EvalReport evaluate(std::span<const FrameBoxes> truth, std::span<const FrameBoxes> pred,
                    const EvalOptions& options) {
  if (!(options.bucket_s > 0.0)) throw InvalidArgument("bucket length must be positive");
  EvalReport r;
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> pairs;
  std::map<std::int64_t, ConfusionCounts> buckets;
  for (const auto& f : align(truth, pred)) {
    FrameMatch m = match_frame(f.truth, f.pred, options.iou_min);
    r.total += m.counts;
    ++r.frames;
    buckets[static_cast<std::int64_t>(std::floor(f.timestamp / options.bucket_s))] += m.counts;
    pairs.push_back(std::move(m.pairs));
  }
  r.id_switches = id_switches(pairs);
  try {
    r.metrics = prf(r.total);
  } catch (const UndefinedMetric&) {
  }
  for (const auto& [index, counts] : buckets) {
    BucketReport b{index, static_cast<double>(index) * options.bucket_s, counts, std::nullopt};
    try {
      b.metrics = prf(counts);
    } catch (const UndefinedMetric&) {
    }
    r.buckets.push_back(b);
  }
  return r;
}

std::vector<FrameBoxes> frames_from_truth(std::span<const TruthRow> rows) {
  return group(rows, [](const TruthRow& r) { return r.id; });
}

std::vector<FrameBoxes> frames_from_tracks(std::span<const TrackRow> rows) {
  return group(rows, [](const TrackRow& r) { return r.id; });
}

std::vector<FrameBoxes> frames_from_detections(std::span<const DetectionFrame> frames) {
  std::vector<FrameBoxes> out;
  for (const auto& f : frames) {
    FrameBoxes fb{f.frame, f.timestamp, {}};
    std::int64_t k = 0;
    for (const auto& d : f.boxes) fb.boxes.push_back({k++, d.box});
    out.push_back(std::move(fb));
  }
  std::sort(out.begin(), out.end(), [](const FrameBoxes& a, const FrameBoxes& b) { return a.frame < b.frame; });
  return out;
}

std::string format_prf(const ConfusionCounts& c, const Prf& p) {
  return fmt::format("tp {}\nfp {}\nfn {}\nprecision {:.2f}\nrecall {:.2f}\nf1 {:.2f}\n", c.tp, c.fp, c.fn,
                     p.precision, p.recall, p.f1);
}

std::string format_report(const EvalReport& r) {
  std::string out = fmt::format("frames {}\ntp {}\nfp {}\nfn {}\nprecision {}\nrecall {}\nf1 {}\nid_switches {}\n",
                                r.frames, r.total.tp, r.total.fp, r.total.fn,
                                metric_or_undefined(r.metrics, &Prf::precision),
                                metric_or_undefined(r.metrics, &Prf::recall), metric_or_undefined(r.metrics, &Prf::f1),
                                r.id_switches);
  for (const auto& b : r.buckets) {
    out += fmt::format("bucket {} start {:.1f} tp {} fp {} fn {} precision {} recall {} f1 {}\n", b.index, b.start_s,
                       b.counts.tp, b.counts.fp, b.counts.fn, metric_or_undefined(b.metrics, &Prf::precision),
                       metric_or_undefined(b.metrics, &Prf::recall), metric_or_undefined(b.metrics, &Prf::f1));
  }
  return out;
}

}  // namespace skytrack
