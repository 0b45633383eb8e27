#pragma once

#include <charconv>
#include <string>

namespace tradenet::detail {

// Shortest decimal form that parses back to the same double.
inline void append_number(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

inline std::string format_number(double v) {
  std::string s;
  append_number(s, v);
  return s;
}

}  // namespace tradenet::detail
