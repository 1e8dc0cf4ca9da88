#pragma once

// Frame scheduler that decouples ingestion from processing.
//
// An ingester pushes envelopes into a bounded buffer and a processor drains
// it through the engine stage. In realtime replay the ingester never waits:
// when the buffer is full the oldest frame is evicted and counted dropped,
// so the processor always works on the freshest frame. In as-fast-as-possible
// replay the ingester blocks instead and nothing is dropped.
//
// Timing runs on a virtual clock (deterministic, costs injected per frame)
// or on the wall clock with two threads.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "skytrack/detection.hpp"
#include "skytrack/engine.hpp"
#include "skytrack/error.hpp"

namespace skytrack {

struct FrameEnvelope {
  std::int64_t index = 0;
  double timestamp = 0.0;  // source time, seconds
  DetectionFrame payload;
};

/// Bounded FIFO that always admits the incoming item and evicts the oldest
/// ones beyond capacity.
template <class T>
class LatestWinsBuffer {
 public:
  explicit LatestWinsBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw InvalidArgument("buffer capacity must be >= 1");
  }

  /// Returns the evicted items, oldest first.
  std::vector<T> push(T incoming) {
    items_.push_back(std::move(incoming));
    std::vector<T> dropped;
    while (items_.size() > capacity_) {
      dropped.push_back(std::move(items_.front()));
      items_.pop_front();
    }
    return dropped;
  }

  std::optional<T> pop() {
    if (items_.empty()) return std::nullopt;
    T front = std::move(items_.front());
    items_.pop_front();
    return front;
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool full() const { return items_.size() >= capacity_; }
  std::size_t capacity() const { return capacity_; }
  const std::deque<T>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::deque<T> items_;
};

struct PipelineStats {
  std::int64_t received = 0;
  std::int64_t processed = 0;
  std::int64_t dropped = 0;
  std::int64_t in_flight = 0;  // buffered plus the frame being processed
  std::int64_t displayed = 0;  // pass-through display path sees every received frame
  std::size_t max_occupancy = 0;
  double elapsed_s = 0.0;        // first arrival to last completion
  double current_fps = 0.0;      // processed / elapsed_s
  double max_latency_s = 0.0;    // arrival to completion
  double mean_latency_s = 0.0;
  std::vector<std::int64_t> processed_indices;
};

enum class ClockMode { Virtual, Wall };
enum class ReplayMode { AsFastAsPossible, Realtime };

struct PipelineOptions {
  std::size_t capacity = 1;
  ReplayMode replay = ReplayMode::AsFastAsPossible;
  ClockMode clock = ClockMode::Virtual;
  /// Virtual-clock processing cost in seconds per frame; zero when unset.
  std::function<double(const FrameEnvelope&)> stage_cost;
  /// Called with a stats snapshot after every arrival and completion.
  std::function<void(const PipelineStats&)> observer;
};

using FrameSource = std::function<std::optional<FrameEnvelope>()>;
using Stage = std::function<FrameResult(const FrameEnvelope&)>;
using Sink = std::function<void(const FrameResult&)>;

/// Stage failure: carries the stats up to the failure and the failing frame.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& what, PipelineStats partial, std::int64_t frame)
      : Error(ErrorKind::Runtime, what), stats_(std::move(partial)), frame_(frame) {}

  const PipelineStats& stats() const { return stats_; }
  std::int64_t failed_frame() const { return frame_; }

 private:
  PipelineStats stats_;
  std::int64_t frame_;
};

/// Every received frame is either processed once, in source order, or
/// counted dropped. Sinks see results in processing order. Throws
/// OrderingError when indices stop increasing and PipelineError when the
/// stage throws.
PipelineStats run_pipeline(const FrameSource& source, const Stage& stage, std::span<const Sink> sinks,
                           const PipelineOptions& options);

FrameSource envelope_source(std::span<const FrameEnvelope> envelopes);
FrameSource envelope_source(std::span<const DetectionFrame> frames);

FrameEnvelope make_envelope(DetectionFrame frame);

}  // namespace skytrack
