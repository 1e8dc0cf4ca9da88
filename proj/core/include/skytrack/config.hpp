#pragma once

// Engine configuration, read from a JSON document with the sections
// camera, video, view, tracker, sampling, analytics, lanes and pipeline.
// Every key is optional and falls back to the defaults below; unknown keys
// and wrongly typed values are rejected.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "skytrack/analytics.hpp"
#include "skytrack/geometry.hpp"
#include "skytrack/tracker.hpp"

namespace skytrack {

struct EngineConfig {
  CameraGeometry camera{100.0, 83.0};
  ViewSize video{1920, 1080};  // stream resolution; detections are in these pixels
  ViewSize view{1920, 1080};   // display the overlay is drawn into
  TrackerConfig tracker;
  AnalyticsConfig analytics;
  std::optional<BoxCorners> lane_center;  // intersection rectangle in video pixels
  std::size_t capacity = 1;               // frame buffer depth
};

void validate(const EngineConfig& cfg);

/// Throws ParseError on malformed JSON, unknown keys or bad types, and
/// InvalidArgument when a value violates its range.
EngineConfig parse_engine_config(std::string_view json_text);

/// Throws IoError naming the path when the file cannot be read.
EngineConfig load_engine_config(const std::filesystem::path& path);

std::string engine_config_to_json(const EngineConfig& cfg);

}  // namespace skytrack
