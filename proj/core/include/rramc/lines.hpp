#pragma once

#include <cstdint>
#include <string>

#include "rramc/textio.hpp"

namespace rramc {

// The three control-line families of a 1T1R array. SEL drives the access
// transistor gates of one row; P and N contact the two terminals of every
// cell in one column (P at the memristor, N at the transistor source).
enum class LineKind : std::uint8_t { SEL, P, N };

inline const char* line_kind_name(LineKind k) {
  switch (k) {
    case LineKind::SEL: return "SEL";
    case LineKind::P: return "P";
    case LineKind::N: return "N";
  }
  return "?";
}

struct LineId {
  LineKind kind{LineKind::SEL};
  std::uint32_t index{0};
  friend bool operator==(const LineId&, const LineId&) = default;
};

// Canonical zero-padded net name, e.g. line_name(SEL, 7, 3) == "SEL007".
inline std::string line_name(LineKind k, std::uint32_t index, int pad_width) {
  return std::string(line_kind_name(k)) + textio::pad(index, pad_width);
}

}  // namespace rramc
