#pragma once

// Box representations, aspect-fit drawing area and camera-to-ground scale.
//
// Canonical coordinates everywhere downstream of the input boundary are
// pixels with a top-left origin and y growing downward. Vision-style boxes
// (normalized, bottom-left origin) are converted once by normalized_to_pixel.

#include <cmath>

namespace skytrack {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Top-left-origin pixel box as [x, y, w, h].
struct BoxXYWH {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const BoxXYWH&, const BoxXYWH&) = default;
};

/// Normalized box with a bottom-left origin, as emitted by vision frameworks.
struct NormalizedBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

/// Top-left-origin pixel box as [x1, y1, x2, y2].
struct BoxCorners {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  Point center() const { return {0.5 * (x1 + x2), 0.5 * (y1 + y2)}; }

  friend bool operator==(const BoxCorners&, const BoxCorners&) = default;
};

struct ViewSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const ViewSize&, const ViewSize&) = default;
};

/// Sub-rectangle of a view that shows the video at its native aspect ratio.
struct DrawingArea {
  int dx = 0;
  int dy = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const DrawingArea&, const DrawingArea&) = default;
};

struct CameraGeometry {
  double altitude_m = 0.0;
  double lens_angle_deg = 0.0;  // horizontal field of view
};

struct ScaleModel {
  double ground_width_m = 0.0;
  double meters_per_pixel = 0.0;
};

/// Throws InvalidArgument when w or h is not strictly positive or any field is non-finite.
void validate(const BoxXYWH& b);
void validate(const BoxCorners& b);
void validate(const ViewSize& v);
void validate(const CameraGeometry& cam);

BoxCorners xywh_to_corners(const BoxXYWH& b);
BoxXYWH corners_to_xywh(const BoxCorners& b);

/// Flip the y-axis and scale a normalized bottom-left box into image pixels.
/// Throws InvalidArgument if the box leaves the unit square.
BoxXYWH normalized_to_pixel(const NormalizedBox& b, const ViewSize& image);

/// Aspect-fit the video into the view, centering on the padded axis. Sizes
/// are floored; an odd leftover pixel lands on the bottom or right margin.
DrawingArea compute_drawing_area(const ViewSize& video, const ViewSize& view);

/// Ground footprint width 2 * altitude * tan(fov / 2).
double ground_width(const CameraGeometry& cam);

ScaleModel pixel_scale(double ground_width_m, const DrawingArea& area);

/// Intersection over union; 0 for disjoint boxes.
double iou(const BoxCorners& a, const BoxCorners& b);

inline bool is_finite(const BoxCorners& b) {
  return std::isfinite(b.x1) && std::isfinite(b.y1) && std::isfinite(b.x2) && std::isfinite(b.y2);
}

}  // namespace skytrack
