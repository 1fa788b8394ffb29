#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "rramc/errors.hpp"

namespace rramc::textio {

// Fixed-format scientific notation, 6 fractional digits ("1.280000e+00").
// Used everywhere a value lands in an emitted artifact so that output is
// byte-identical across runs and platforms.
inline std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

// Shortest round-trippable decimal form, for values that must survive a
// parse back to the identical double.
inline std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Fixed decimal with the given fractional digit count.
inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Zero-padded decimal index ("007" for pad(7, 3)). Width is capped at the
// buffer so the formatter cannot truncate.
inline std::string pad(unsigned long v, int width) {
  char buf[32];
  if (width < 1) width = 1;
  if (width > 20) width = 20;
  std::snprintf(buf, sizeof buf, "%0*lu", width, v);
  return buf;
}

// Digit count used to zero-pad indices 0..count-1 uniformly.
inline int index_width(unsigned long count) {
  int w = 1;
  for (unsigned long x = (count == 0 ? 0 : count - 1); x >= 10; x /= 10) ++w;
  return w;
}

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double parse_double(std::string_view s);          // throws ConfigError
long long parse_int(std::string_view s);          // throws ConfigError
unsigned long parse_uint(std::string_view s);     // throws ConfigError

}  // namespace rramc::textio
