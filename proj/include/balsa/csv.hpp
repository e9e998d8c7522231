#pragma once

#include <charconv>
#include <string>
#include <vector>

namespace balsa {

// Shortest round-trip decimal form; locale-independent and deterministic,
// so repeated runs produce byte-identical files.
inline void append_number(std::string& out, double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

inline std::string format_number(double value) {
  std::string s;
  append_number(s, value);
  return s;
}

// Splits one CSV line on commas (no quoting; our files never need it).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace balsa
