#include "skytrack/engine.hpp"

namespace skytrack {

namespace {

EngineConfig validated(EngineConfig cfg) {
  validate(cfg);
  return cfg;
}

}  // namespace

Engine::Engine(EngineConfig cfg)
    : cfg_(validated(std::move(cfg))),
      area_(compute_drawing_area(cfg_.video, cfg_.view)),
      // Detections live in video pixels, so the scale is taken over the
      // full-resolution frame; the drawing area has the same aspect ratio.
      scale_(pixel_scale(ground_width(cfg_.camera), DrawingArea{0, 0, cfg_.video.width, cfg_.video.height})),
      tracker_(cfg_.tracker),
      micro_(cfg_.analytics) {
  if (cfg_.lane_center) regions_ = build_lane_regions(*cfg_.lane_center, cfg_.video);
}

FrameResult Engine::process(const DetectionFrame& frame) {
  if (last_timestamp_) meter_.record(*last_timestamp_, frame.timestamp);
  last_timestamp_ = frame.timestamp;
  if (!sfps_ && meter_.ready()) sfps_ = skytrack::sampling_interval(meter_, cfg_.analytics.sampling);

  FrameResult r;
  r.frame = frame.frame;
  r.timestamp = frame.timestamp;
  r.tracks = tracker_.step(frame);
  r.micro = micro_.update(frame.frame, r.tracks, sfps_.value_or(0), scale_);

  if (sfps_ && ++frames_in_interval_ >= *sfps_) {
    r.macro = macro_snapshot(interval_++, frame.frame, frame.timestamp, r.tracks, r.micro, regions_);
    frames_in_interval_ = 0;
    sfps_ = skytrack::sampling_interval(meter_, cfg_.analytics.sampling);
  }

  r.draw = emit_draw_commands(frame.frame, r.tracks, r.micro, area_, cfg_.video);
  return r;
}

}  // namespace skytrack
