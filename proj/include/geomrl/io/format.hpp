#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "geomrl/errors.hpp"

namespace geomrl::io {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw Error("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace geomrl::io
