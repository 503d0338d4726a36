#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace dipolesim::detail {

// Shortest decimal form that round-trips to the same double. Keeps CSV and
// JSON output byte-stable across platforms, unlike iostream defaults.
inline void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline void append_u64(std::string& out, std::uint64_t v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

}  // namespace dipolesim::detail
