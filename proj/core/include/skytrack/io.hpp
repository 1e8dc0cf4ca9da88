#pragma once

// File formats.
//
// Detections and draw commands are line-delimited JSON objects, one per line.
// Tracks, micro records and macro snapshots are CSV. All numbers are written
// locale-independently with a '.' decimal separator and fixed precision.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skytrack/analytics.hpp"
#include "skytrack/detection.hpp"
#include "skytrack/lanes.hpp"
#include "skytrack/tracker.hpp"

namespace skytrack {

/// Fixed-point text for a number, never "-0.000".
std::string format_fixed(double v, int decimals = 3);

// ---- detections -----------------------------------------------------------

/// Parses one detection line. Every field is required and unknown keys are
/// rejected. Throws ParseError naming `line_no`.
DetectionFrame parse_detection_line(std::string_view text, std::int64_t line_no = 0);
std::string format_detection_line(const DetectionFrame& frame);

/// Streaming reader. Blank lines are skipped; frame indices must strictly
/// increase and timestamps must not decrease.
class DetectionReader {
 public:
  explicit DetectionReader(std::istream& in) : in_(in) {}

  std::optional<DetectionFrame> next();
  std::int64_t line() const { return line_; }

 private:
  std::istream& in_;
  std::int64_t line_ = 0;
  std::optional<DetectionFrame> last_;
};

std::vector<DetectionFrame> read_detection_stream(std::istream& in);
std::vector<DetectionFrame> read_detection_file(const std::filesystem::path& path);
void write_detection_stream(std::ostream& out, std::span<const DetectionFrame> frames);

// ---- tracks CSV -----------------------------------------------------------

struct TrackRow {
  std::int64_t frame = 0;
  double timestamp = 0.0;
  std::int64_t id = 0;
  BoxXYWH box;
  TrackStatus status = TrackStatus::Tracked;
};

inline constexpr std::string_view kTracksHeader = "frame,t,id,x,y,w,h,status";

void write_tracks_header(std::ostream& out);
void write_track_rows(std::ostream& out, std::int64_t frame, double timestamp,
                      std::span<const TrackOutput> tracks);
std::vector<TrackRow> read_tracks_csv(std::istream& in);

// ---- micro CSV ------------------------------------------------------------

inline constexpr std::string_view kMicroHeader =
    "frame,id,x,y,w,h,speed_mps,accel_mps2,heading_deg,direction,lane_change";

void write_micro_header(std::ostream& out);
/// Missing acceleration or heading is written as an empty cell.
void write_micro_row(std::ostream& out, const MicroRecord& r);
void write_micro_csv(std::ostream& out, std::span<const MicroRecord> records);
std::vector<MicroRecord> read_micro_csv(std::istream& in);

// ---- macro CSV ------------------------------------------------------------

std::string macro_header();
void write_macro_row(std::ostream& out, const MacroSnapshot& s);

// ---- draw commands --------------------------------------------------------

/// Overlay geometry for one track in drawing-area (view) coordinates.
struct DrawCommand {
  std::int64_t frame = 0;
  std::int64_t track_id = 0;
  std::array<Point, 4> corners;  // clockwise from top-left
  BoxXYWH label_box;
  std::string label;
  std::string color;  // warmup | stationary | moving | lane_change | turn | coasting
};

/// Maps video-pixel tracks into the drawing area (scale then offset by the
/// area origin). The label box is four box-widths wide, one box-height tall,
/// sits one box-height above the box, and is clamped into the area.
std::vector<DrawCommand> emit_draw_commands(std::int64_t frame, std::span<const TrackOutput> tracks,
                                            std::span<const MicroRecord> micro,
                                            const DrawingArea& area, const ViewSize& video);

std::string format_draw_command(const DrawCommand& c);

}  // namespace skytrack
