#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

#include "pla/error.hpp"

namespace pla {

// shortest representation that parses back to the same double
inline std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// fixed 17 significant digits (embedding export contract)
inline std::string fmt_double17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view text, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    raise("CsvSchemaError", where + ": '" + std::string(text) + "' is not a number");
  return v;
}

inline long long parse_int(std::string_view text, const std::string& where) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    raise("CsvSchemaError", where + ": '" + std::string(text) + "' is not an integer");
  return v;
}

}  // namespace pla
