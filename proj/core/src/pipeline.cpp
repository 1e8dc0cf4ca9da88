#include "skytrack/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace skytrack {

namespace {

using Nanos = std::int64_t;

Nanos to_nanos(double seconds) { return std::llround(seconds * 1e9); }
double to_seconds(Nanos ns) { return static_cast<double>(ns) * 1e-9; }

// Pulls from the source and enforces increasing indices and, for realtime
// replay, non-decreasing timestamps.
class OrderedSource {
 public:
  OrderedSource(const FrameSource& source, bool check_time) : source_(source), check_time_(check_time) {}

  std::optional<FrameEnvelope> next() {
    auto env = source_();
    if (!env) return env;
    if (last_index_ && env->index <= *last_index_) {
      throw OrderingError(fmt::format("frame {} arrived after frame {}", env->index, *last_index_));
    }
    if (check_time_ && last_time_ && env->timestamp < *last_time_) {
      throw OrderingError(fmt::format("frame {} timestamp {} precedes {}", env->index, env->timestamp,
                                      *last_time_));
    }
    last_index_ = env->index;
    last_time_ = env->timestamp;
    return env;
  }

 private:
  const FrameSource& source_;
  bool check_time_;
  std::optional<std::int64_t> last_index_;
  std::optional<double> last_time_;
};

class StatsBuilder {
 public:
  PipelineStats stats;

  void arrival(Nanos t) {
    if (!first_arrival_) first_arrival_ = t;
    ++stats.received;
    ++stats.displayed;
  }

  void completion(std::int64_t index, Nanos arrival, Nanos done) {
    ++stats.processed;
    stats.processed_indices.push_back(index);
    const double latency = to_seconds(done - arrival);
    stats.max_latency_s = std::max(stats.max_latency_s, latency);
    latency_sum_ += latency;
    stats.mean_latency_s = latency_sum_ / static_cast<double>(stats.processed);
    if (first_arrival_) {
      stats.elapsed_s = to_seconds(done - *first_arrival_);
      stats.current_fps = stats.elapsed_s > 0.0 ? stats.processed / stats.elapsed_s : 0.0;
    }
  }

 private:
  std::optional<Nanos> first_arrival_;
  double latency_sum_ = 0.0;
};

void notify(const PipelineOptions& o, const PipelineStats& s) {
  if (o.observer) o.observer(s);
}

double cost_of(const PipelineOptions& o, const FrameEnvelope& env) {
  if (!o.stage_cost) return 0.0;
  const double c = o.stage_cost(env);
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument(fmt::format("invalid stage cost {}", c));
  return c;
}

FrameResult run_stage(const Stage& stage, const FrameEnvelope& env, const PipelineStats& stats) {
  try {
    return stage(env);
  } catch (const std::exception& e) {
    throw PipelineError(fmt::format("stage failed on frame {}: {}", env.index, e.what()), stats, env.index);
  }
}

void deliver(std::span<const Sink> sinks, const FrameResult& r) {
  for (const auto& sink : sinks) sink(r);
}

PipelineStats run_virtual_afap(const FrameSource& source, const Stage& stage, std::span<const Sink> sinks,
                               const PipelineOptions& o) {
  OrderedSource in(source, false);
  StatsBuilder sb;
  Nanos now = 0;
  while (auto env = in.next()) {
    sb.arrival(now);
    sb.stats.in_flight = 1;
    sb.stats.max_occupancy = std::max<std::size_t>(sb.stats.max_occupancy, 1);
    notify(o, sb.stats);
    const Nanos arrival = now;
    FrameResult r = run_stage(stage, *env, sb.stats);
    now += to_nanos(cost_of(o, *env));
    sb.completion(env->index, arrival, now);
    sb.stats.in_flight = 0;
    deliver(sinks, r);
    notify(o, sb.stats);
  }
  return sb.stats;
}

PipelineStats run_virtual_realtime(const FrameSource& source, const Stage& stage,
                                   std::span<const Sink> sinks, const PipelineOptions& o) {
  struct Pending {
    FrameEnvelope env;
    Nanos arrival;
  };
  struct Busy {
    std::int64_t index;
    Nanos arrival;
    Nanos done;
    FrameResult result;
  };

  OrderedSource in(source, true);
  LatestWinsBuffer<Pending> buffer(o.capacity);
  StatsBuilder sb;
  std::optional<Busy> busy;
  std::optional<FrameEnvelope> next = in.next();
  Nanos now = 0;

  auto in_flight = [&] { return static_cast<std::int64_t>(buffer.size()) + (busy ? 1 : 0); };
  auto arrival_pending_now = [&] { return next && to_nanos(next->timestamp) == now; };
  auto start = [&] {
    auto p = buffer.pop();
    if (!p) return;
    FrameResult r = run_stage(stage, p->env, sb.stats);
    busy = Busy{p->env.index, p->arrival, now + to_nanos(cost_of(o, p->env)), std::move(r)};
  };

  while (busy || !buffer.empty() || next) {
    const bool arrival_first = next && (!busy || to_nanos(next->timestamp) < busy->done);
    if (arrival_first) {
      now = std::max(now, to_nanos(next->timestamp));
      sb.arrival(now);
      sb.stats.dropped += static_cast<std::int64_t>(buffer.push({std::move(*next), now}).size());
      sb.stats.max_occupancy = std::max(sb.stats.max_occupancy, buffer.size());
      sb.stats.in_flight = in_flight();
      notify(o, sb.stats);
      next = in.next();
      // Same-instant arrivals are all admitted before the processor picks.
      if (!busy && !arrival_pending_now()) start();
    } else if (busy) {
      now = busy->done;
      Busy finished = std::move(*busy);
      busy.reset();
      sb.completion(finished.index, finished.arrival, finished.done);
      sb.stats.in_flight = in_flight();
      deliver(sinks, finished.result);
      notify(o, sb.stats);
      if (!arrival_pending_now()) start();
    } else {
      start();
    }
    sb.stats.in_flight = in_flight();
  }
  return sb.stats;
}

PipelineStats run_wall(const FrameSource& source, const Stage& stage, std::span<const Sink> sinks,
                       const PipelineOptions& o) {
  using Clock = std::chrono::steady_clock;
  struct Pending {
    FrameEnvelope env;
    Nanos arrival;
  };

  const bool realtime = o.replay == ReplayMode::Realtime;
  const auto t0 = Clock::now();
  auto since_start = [&] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
  };

  std::mutex mu;
  std::condition_variable cv;
  LatestWinsBuffer<Pending> buffer(o.capacity);
  StatsBuilder sb;
  bool ingest_done = false;
  bool abort = false;
  bool processing = false;
  std::exception_ptr ingest_error;

  std::thread ingester([&] {
    try {
      OrderedSource in(source, realtime);
      std::optional<double> ts0;
      while (auto env = in.next()) {
        if (realtime) {
          if (!ts0) ts0 = env->timestamp;
          std::this_thread::sleep_until(
              t0 + std::chrono::nanoseconds(to_nanos(env->timestamp - *ts0)));
        }
        std::unique_lock lock(mu);
        if (!realtime) cv.wait(lock, [&] { return abort || !buffer.full(); });
        if (abort) break;
        const Nanos now = since_start();
        sb.arrival(now);
        sb.stats.dropped += static_cast<std::int64_t>(buffer.push({std::move(*env), now}).size());
        sb.stats.max_occupancy = std::max(sb.stats.max_occupancy, buffer.size());
        sb.stats.in_flight = static_cast<std::int64_t>(buffer.size()) + (processing ? 1 : 0);
        notify(o, sb.stats);
        cv.notify_all();
      }
    } catch (...) {
      std::lock_guard lock(mu);
      ingest_error = std::current_exception();
    }
    std::lock_guard lock(mu);
    ingest_done = true;
    cv.notify_all();
  });

  auto stop = [&] {
    {
      std::lock_guard lock(mu);
      abort = true;
      cv.notify_all();
    }
    ingester.join();
  };

  while (true) {
    std::optional<Pending> p;
    PipelineStats snapshot;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return !buffer.empty() || ingest_done; });
      if (buffer.empty()) break;
      p = buffer.pop();
      processing = true;
      snapshot = sb.stats;
      cv.notify_all();
    }
    try {
      FrameResult r = run_stage(stage, p->env, snapshot);
      {
        std::lock_guard lock(mu);
        processing = false;
        sb.completion(p->env.index, p->arrival, since_start());
        sb.stats.in_flight = static_cast<std::int64_t>(buffer.size());
        notify(o, sb.stats);
      }
      deliver(sinks, r);
    } catch (...) {
      stop();
      throw;
    }
  }
  ingester.join();
  if (ingest_error) std::rethrow_exception(ingest_error);
  return sb.stats;
}

}  // namespace

PipelineStats run_pipeline(const FrameSource& source, const Stage& stage, std::span<const Sink> sinks,
                           const PipelineOptions& options) {
  if (options.capacity < 1) throw InvalidArgument("buffer capacity must be >= 1");
  if (options.clock == ClockMode::Wall) return run_wall(source, stage, sinks, options);
  if (options.replay == ReplayMode::Realtime) return run_virtual_realtime(source, stage, sinks, options);
  return run_virtual_afap(source, stage, sinks, options);
}

FrameSource envelope_source(std::span<const FrameEnvelope> envelopes) {
  return [envelopes, i = std::size_t{0}]() mutable -> std::optional<FrameEnvelope> {
    if (i >= envelopes.size()) return std::nullopt;
    return envelopes[i++];
  };
}

FrameSource envelope_source(std::span<const DetectionFrame> frames) {
  return [frames, i = std::size_t{0}]() mutable -> std::optional<FrameEnvelope> {
    if (i >= frames.size()) return std::nullopt;
    return make_envelope(frames[i++]);
  };
}

FrameEnvelope make_envelope(DetectionFrame frame) {
  FrameEnvelope env;
  env.index = frame.frame;
  env.timestamp = frame.timestamp;
  env.payload = std::move(frame);
  return env;
}

}  // namespace skytrack
