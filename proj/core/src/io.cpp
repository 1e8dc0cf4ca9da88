#include "skytrack/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "skytrack/error.hpp"
#include "csv_util.hpp"

namespace skytrack {

namespace {

using nlohmann::json;
using namespace detail;

void require_keys(const json& obj, std::initializer_list<std::string_view> keys,
                  std::string_view what, std::int64_t line_no) {
  if (!obj.is_object()) throw ParseError(fmt::format("{} must be an object", what), line_no);
  for (auto k : keys) {
    if (!obj.contains(k)) throw ParseError(fmt::format("{} is missing field \"{}\"", what, k), line_no);
  }
  for (const auto& [k, v] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ParseError(fmt::format("{} has unknown field \"{}\"", what, k), line_no);
    }
  }
}

double number_field(const json& obj, const char* key, std::int64_t line_no) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(fmt::format("field \"{}\" must be a number", key), line_no);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(fmt::format("field \"{}\" is not finite", key), line_no);
  return d;
}

std::string opt_fixed(const std::optional<double>& v) { return v ? format_fixed(*v) : std::string(); }

}  // namespace

std::string format_fixed(double v, int decimals) {
  std::string s = fmt::format("{:.{}f}", v, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

// ---- detections -----------------------------------------------------------

DetectionFrame parse_detection_line(std::string_view text, std::int64_t line_no) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("malformed JSON: {}", e.what()), line_no);
  }
  require_keys(obj, {"frame", "t", "boxes"}, "frame record", line_no);

  DetectionFrame f;
  const json& idx = obj.at("frame");
  if (!idx.is_number_integer() || idx.get<std::int64_t>() < 0) {
    throw ParseError("field \"frame\" must be a non-negative integer", line_no);
  }
  f.frame = idx.get<std::int64_t>();
  f.timestamp = number_field(obj, "t", line_no);

  const json& boxes = obj.at("boxes");
  if (!boxes.is_array()) throw ParseError("field \"boxes\" must be an array", line_no);
  for (const json& b : boxes) {
    require_keys(b, {"x", "y", "w", "h", "score", "class"}, "box", line_no);
    Detection d;
    d.box = {number_field(b, "x", line_no), number_field(b, "y", line_no),
             number_field(b, "w", line_no), number_field(b, "h", line_no)};
    if (d.box.w <= 0.0 || d.box.h <= 0.0) {
      throw ParseError(fmt::format("box has non-positive size w={} h={}", d.box.w, d.box.h), line_no);
    }
    d.score = number_field(b, "score", line_no);
    if (d.score < 0.0 || d.score > 1.0) {
      throw ParseError(fmt::format("score {} outside [0, 1]", d.score), line_no);
    }
    if (!b.at("class").is_string()) throw ParseError("field \"class\" must be a string", line_no);
    d.label = b.at("class").get<std::string>();
    f.boxes.push_back(std::move(d));
  }
  return f;
}

std::string format_detection_line(const DetectionFrame& frame) {
  std::string out = fmt::format(R"({{"frame":{},"t":{},"boxes":[)", frame.frame, format_fixed(frame.timestamp));
  bool first = true;
  for (const auto& d : frame.boxes) {
    if (!first) out += ',';
    first = false;
    out += fmt::format(R"({{"x":{},"y":{},"w":{},"h":{},"score":{},"class":{}}})", format_fixed(d.box.x),
                       format_fixed(d.box.y), format_fixed(d.box.w), format_fixed(d.box.h),
                       format_fixed(d.score), json(d.label).dump());
  }
  out += "]}";
  return out;
}

std::optional<DetectionFrame> DetectionReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (is_blank(line)) continue;
    DetectionFrame f = parse_detection_line(strip_cr(line), line_);
    if (last_) {
      if (f.frame <= last_->frame) {
        throw OrderingError(fmt::format("line {}: frame {} does not follow frame {}", line_, f.frame,
                                        last_->frame));
      }
      if (f.timestamp < last_->timestamp) {
        throw OrderingError(fmt::format("line {}: timestamp {} precedes {}", line_, f.timestamp,
                                        last_->timestamp));
      }
    }
    last_ = f;
    return f;
  }
  return std::nullopt;
}

std::vector<DetectionFrame> read_detection_stream(std::istream& in) {
  DetectionReader reader(in);
  std::vector<DetectionFrame> frames;
  while (auto f = reader.next()) frames.push_back(std::move(*f));
  return frames;
}

std::vector<DetectionFrame> read_detection_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open detections file {}", path.string()));
  return read_detection_stream(in);
}

void write_detection_stream(std::ostream& out, std::span<const DetectionFrame> frames) {
  for (const auto& f : frames) out << format_detection_line(f) << '\n';
  if (!out) throw IoError("failed to write detection stream");
}

// ---- tracks CSV -----------------------------------------------------------

void write_tracks_header(std::ostream& out) { out << kTracksHeader << '\n'; }

void write_track_rows(std::ostream& out, std::int64_t frame, double timestamp,
                      std::span<const TrackOutput> tracks) {
  for (const auto& t : tracks) {
    const BoxXYWH b = corners_to_xywh(t.box);
    out << fmt::format("{},{},{},{},{},{},{},{}\n", frame, format_fixed(timestamp), t.id,
                       format_fixed(b.x), format_fixed(b.y), format_fixed(b.w), format_fixed(b.h),
                       to_string(t.status));
  }
  if (!out) throw IoError("failed to write tracks");
}

std::vector<TrackRow> read_tracks_csv(std::istream& in) {
  std::int64_t line_no = 0;
  std::vector<TrackRow> rows;
  if (!expect_header(in, kTracksHeader, line_no)) return rows;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto c = split_csv(strip_cr(line));
    if (c.size() != 8) throw ParseError(fmt::format("expected 8 columns, got {}", c.size()), line_no);
    TrackRow r;
    r.frame = parse_int(c[0], line_no, "frame");
    r.timestamp = parse_double(c[1], line_no, "t");
    r.id = parse_int(c[2], line_no, "id");
    r.box = {parse_double(c[3], line_no, "x"), parse_double(c[4], line_no, "y"),
             parse_double(c[5], line_no, "w"), parse_double(c[6], line_no, "h")};
    if (c[7] == "tracked") {
      r.status = TrackStatus::Tracked;
    } else if (c[7] == "coasting") {
      r.status = TrackStatus::Coasting;
    } else {
      throw ParseError(fmt::format("unknown status \"{}\"", c[7]), line_no);
    }
    rows.push_back(r);
  }
  return rows;
}

// ---- micro CSV ------------------------------------------------------------

void write_micro_header(std::ostream& out) { out << kMicroHeader << '\n'; }

void write_micro_row(std::ostream& out, const MicroRecord& r) {
  out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.frame, r.track_id, format_fixed(r.box.x),
                     format_fixed(r.box.y), format_fixed(r.box.w), format_fixed(r.box.h),
                     format_fixed(r.speed_mps), opt_fixed(r.acceleration_mps2),
                     opt_fixed(r.heading_deg), to_string(r.direction), to_string(r.lane_change));
  if (!out) throw IoError("failed to write micro record");
}

void write_micro_csv(std::ostream& out, std::span<const MicroRecord> records) {
  write_micro_header(out);
  for (const auto& r : records) write_micro_row(out, r);
}

std::vector<MicroRecord> read_micro_csv(std::istream& in) {
  std::int64_t line_no = 0;
  std::vector<MicroRecord> rows;
  if (!expect_header(in, kMicroHeader, line_no)) return rows;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto c = split_csv(strip_cr(line));
    if (c.size() != 11) throw ParseError(fmt::format("expected 11 columns, got {}", c.size()), line_no);
    MicroRecord r;
    r.frame = parse_int(c[0], line_no, "frame");
    r.track_id = parse_int(c[1], line_no, "id");
    r.box = {parse_double(c[2], line_no, "x"), parse_double(c[3], line_no, "y"),
             parse_double(c[4], line_no, "w"), parse_double(c[5], line_no, "h")};
    r.speed_mps = parse_double(c[6], line_no, "speed_mps");
    r.acceleration_mps2 = parse_optional(c[7], line_no, "accel_mps2");
    r.heading_deg = parse_optional(c[8], line_no, "heading_deg");
    const auto dir = parse_direction(c[9]);
    if (!dir) throw ParseError(fmt::format("unknown direction \"{}\"", c[9]), line_no);
    r.direction = *dir;
    const auto lc = parse_lane_change(c[10]);
    if (!lc) throw ParseError(fmt::format("unknown lane change \"{}\"", c[10]), line_no);
    r.lane_change = *lc;
    rows.push_back(r);
  }
  return rows;
}

// ---- macro CSV ------------------------------------------------------------

std::string macro_header() {
  std::string h = "interval,frame,t,total";
  for (int i = 0; i < kLaneCount; ++i) h += "," + lane_name(i);
  for (int d = 0; d < kDirectionCount; ++d) {
    const auto name = to_string(static_cast<Direction>(d));
    h += fmt::format(",count_{},speed_{}", name, name);
  }
  return h;
}

void write_macro_row(std::ostream& out, const MacroSnapshot& s) {
  std::string row = fmt::format("{},{},{},{}", s.interval, s.frame, format_fixed(s.timestamp),
                                s.total_vehicles);
  for (auto c : s.lane_counts) row += fmt::format(",{}", c);
  for (const auto& d : s.directions) row += fmt::format(",{},{}", d.count, format_fixed(d.mean_speed_mps));
  out << row << '\n';
  if (!out) throw IoError("failed to write macro snapshot");
}

// ---- draw commands --------------------------------------------------------

std::vector<DrawCommand> emit_draw_commands(std::int64_t frame, std::span<const TrackOutput> tracks,
                                            std::span<const MicroRecord> micro,
                                            const DrawingArea& area, const ViewSize& video) {
  validate(video);
  std::map<std::int64_t, const MicroRecord*> by_id;
  for (const auto& m : micro) by_id[m.track_id] = &m;

  const double sx = static_cast<double>(area.width) / video.width;
  const double sy = static_cast<double>(area.height) / video.height;
  const double left = area.dx;
  const double top = area.dy;
  const double right = area.dx + area.width;
  const double bottom = area.dy + area.height;
  auto map_point = [&](double x, double y) {
    return Point{std::clamp(left + x * sx, left, right), std::clamp(top + y * sy, top, bottom)};
  };

  std::vector<DrawCommand> out;
  out.reserve(tracks.size());
  for (const auto& t : tracks) {
    DrawCommand c;
    c.frame = frame;
    c.track_id = t.id;
    c.corners = {map_point(t.box.x1, t.box.y1), map_point(t.box.x2, t.box.y1),
                 map_point(t.box.x2, t.box.y2), map_point(t.box.x1, t.box.y2)};

    const double bw = c.corners[1].x - c.corners[0].x;
    const double bh = c.corners[3].y - c.corners[0].y;
    const double lw = std::min(4.0 * bw, static_cast<double>(area.width));
    const double lh = std::min(bh, static_cast<double>(area.height));
    c.label_box = {std::clamp(c.corners[0].x, left, right - lw),
                   std::clamp(c.corners[0].y - bh, top, bottom - lh), lw, lh};

    const auto it = by_id.find(t.id);
    const MicroRecord* m = it == by_id.end() ? nullptr : it->second;
    c.label = fmt::format("id {}", t.id);
    if (m) c.label += fmt::format(" {} m/s {}", format_fixed(m->speed_mps, 1), to_string(m->direction));

    if (t.status == TrackStatus::Coasting) {
      c.color = "coasting";
    } else if (!m) {
      c.color = "warmup";
    } else if (m->lane_change == LaneChange::Turn) {
      c.color = "turn";
    } else if (m->lane_change != LaneChange::None) {
      c.color = "lane_change";
    } else if (m->direction == Direction::Stationary) {
      c.color = "stationary";
    } else {
      c.color = "moving";
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::string format_draw_command(const DrawCommand& c) {
  std::string corners;
  for (std::size_t i = 0; i < c.corners.size(); ++i) {
    if (i) corners += ',';
    corners += fmt::format("[{},{}]", format_fixed(c.corners[i].x), format_fixed(c.corners[i].y));
  }
  return fmt::format(
      R"({{"frame":{},"id":{},"corners":[{}],"label_box":{{"x":{},"y":{},"w":{},"h":{}}},"label":{},"color":{}}})",
      c.frame, c.track_id, corners, format_fixed(c.label_box.x), format_fixed(c.label_box.y),
      format_fixed(c.label_box.w), format_fixed(c.label_box.h), json(c.label).dump(),
      json(c.color).dump());
}

}  // namespace skytrack
