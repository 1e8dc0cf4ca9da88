#pragma once

// Line-oriented CSV helpers shared by the readers in io and synth.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "skytrack/error.hpp"

namespace skytrack::detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

inline double parse_double(std::string_view s, std::int64_t line_no, std::string_view column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(fmt::format("column {}: \"{}\" is not a number", column, s), line_no);
  }
  return v;
}

inline std::int64_t parse_int(std::string_view s, std::int64_t line_no, std::string_view column) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(fmt::format("column {}: \"{}\" is not an integer", column, s), line_no);
  }
  return v;
}

inline std::optional<double> parse_optional(std::string_view s, std::int64_t line_no, std::string_view column) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, line_no, column);
}

inline std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

inline bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

// Reads the header line and checks it verbatim; returns false on an empty stream.
inline bool expect_header(std::istream& in, std::string_view header, std::int64_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (strip_cr(line) != header) {
    throw ParseError(fmt::format("unexpected header \"{}\"", strip_cr(line)), line_no);
  }
  return true;
}

}  // namespace skytrack::detail
