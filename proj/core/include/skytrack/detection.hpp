#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skytrack/geometry.hpp"

namespace skytrack {

struct Detection {
  BoxXYWH box;  // top-left pixels
  double score = 1.0;
  std::string label = "car";

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// One video frame's detector output.
struct DetectionFrame {
  std::int64_t frame = 0;
  double timestamp = 0.0;  // seconds
  std::vector<Detection> boxes;

  friend bool operator==(const DetectionFrame&, const DetectionFrame&) = default;
};

}  // namespace skytrack
