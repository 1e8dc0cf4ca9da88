#include "skytrack/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "skytrack/error.hpp"

namespace skytrack {

namespace {

// Slack for normalized coordinates that sum to 1 in exact arithmetic.
constexpr double kUnitSlack = 1e-9;

bool in_unit(double v) { return v >= -kUnitSlack && v <= 1.0 + kUnitSlack; }

}  // namespace

void validate(const BoxXYWH& b) {
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h)) {
    throw InvalidArgument("invalid box: non-finite coordinate");
  }
  if (b.w <= 0.0 || b.h <= 0.0) {
    throw InvalidArgument(fmt::format("invalid box: non-positive size w={} h={}", b.w, b.h));
  }
}

void validate(const BoxCorners& b) {
  if (!is_finite(b)) throw InvalidArgument("invalid box: non-finite corner");
  if (!(b.x1 < b.x2) || !(b.y1 < b.y2)) {
    throw InvalidArgument(
        fmt::format("invalid box: corners ({}, {}, {}, {}) are not ordered", b.x1, b.y1, b.x2, b.y2));
  }
}

void validate(const ViewSize& v) {
  if (v.width <= 0 || v.height <= 0) {
    throw InvalidArgument(fmt::format("invalid size {}x{}", v.width, v.height));
  }
}

void validate(const CameraGeometry& cam) {
  if (!std::isfinite(cam.altitude_m) || cam.altitude_m <= 0.0) {
    throw InvalidArgument(fmt::format("invalid altitude {} m", cam.altitude_m));
  }
  if (!std::isfinite(cam.lens_angle_deg) || cam.lens_angle_deg <= 0.0 || cam.lens_angle_deg >= 180.0) {
    throw InvalidArgument(fmt::format("invalid lens angle {} deg", cam.lens_angle_deg));
  }
}

BoxCorners xywh_to_corners(const BoxXYWH& b) {
  validate(b);
  return {b.x, b.y, b.x + b.w, b.y + b.h};
}

BoxXYWH corners_to_xywh(const BoxCorners& b) {
  validate(b);
  return {b.x1, b.y1, b.x2 - b.x1, b.y2 - b.y1};
}

BoxXYWH normalized_to_pixel(const NormalizedBox& b, const ViewSize& image) {
  validate(image);
  if (!(b.w > 0.0) || !(b.h > 0.0)) {
    throw InvalidArgument(fmt::format("invalid box: non-positive size w={} h={}", b.w, b.h));
  }
  if (!in_unit(b.x) || !in_unit(b.y) || !in_unit(b.x + b.w) || !in_unit(b.y + b.h)) {
    throw InvalidArgument(
        fmt::format("normalized box ({}, {}, {}, {}) is outside the unit square", b.x, b.y, b.w, b.h));
  }
  const double width = image.width;
  const double height = image.height;
  return {b.x * width, (1.0 - b.y - b.h) * height, b.w * width, b.h * height};
}

DrawingArea compute_drawing_area(const ViewSize& video, const ViewSize& view) {
  validate(video);
  validate(view);
  // floor(view.width / (video.width / video.height)) evaluated exactly in integers.
  const std::int64_t fit_height =
      static_cast<std::int64_t>(view.width) * video.height / video.width;
  if (fit_height <= view.height) {
    const int h = static_cast<int>(fit_height);
    return {0, (view.height - h) / 2, view.width, h};
  }
  const std::int64_t fit_width =
      static_cast<std::int64_t>(view.height) * video.width / video.height;
  const int w = static_cast<int>(fit_width);
  return {(view.width - w) / 2, 0, w, view.height};
}

double ground_width(const CameraGeometry& cam) {
  validate(cam);
  // tan(a/2) = sin(a) / (1 + cos(a)); exact at 90 degrees where tan(pi/4) is not.
  const double angle = cam.lens_angle_deg * std::numbers::pi / 180.0;
  return 2.0 * cam.altitude_m * std::sin(angle) / (1.0 + std::cos(angle));
}

ScaleModel pixel_scale(double ground_width_m, const DrawingArea& area) {
  if (area.width <= 0) throw InvalidArgument(fmt::format("invalid drawing area width {}", area.width));
  return {ground_width_m, ground_width_m / area.width};
}

double iou(const BoxCorners& a, const BoxCorners& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace skytrack
