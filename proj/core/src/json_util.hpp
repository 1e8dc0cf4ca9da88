#pragma once

// Strict accessors shared by the config and scenario readers.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "skytrack/error.hpp"

namespace skytrack::detail {

using nlohmann::json;

inline void check_keys(const json& obj, std::string_view section,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ParseError(fmt::format("\"{}\" must be an object", section));
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == k;
    if (!known) throw ParseError(fmt::format("unknown key \"{}\" in \"{}\"", k, section));
  }
}

inline double get_number(const json& obj, std::string_view section, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(fmt::format("\"{}.{}\" must be a number", section, key));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(fmt::format("\"{}.{}\" is not finite", section, key));
  return d;
}

inline std::int64_t get_integer(const json& obj, std::string_view section, const char* key,
                                std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ParseError(fmt::format("\"{}.{}\" must be an integer", section, key));
  return v.get<std::int64_t>();
}

inline bool get_bool(const json& obj, std::string_view section, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ParseError(fmt::format("\"{}.{}\" must be a boolean", section, key));
  return v.get<bool>();
}

inline std::string get_string(const json& obj, std::string_view section, const char* key,
                              const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ParseError(fmt::format("\"{}.{}\" must be a string", section, key));
  return v.get<std::string>();
}

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("malformed {}: {}", what, e.what()));
  }
}

}  // namespace skytrack::detail
