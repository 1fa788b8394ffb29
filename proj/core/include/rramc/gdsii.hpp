#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rramc/layout.hpp"

namespace rramc::gdsii {

// Serializes the database into the binary stream subset: HEADER, BGNLIB,
// LIBNAME, UNITS, and per structure BGNSTR/STRNAME with BOUNDARY (closed
// 5-point rectangles) and SREF elements. Timestamps are a fixed epoch unless
// real_timestamps is set, so byte-identical output is the default.
std::vector<std::uint8_t> emit(const layout::LayoutDb& db, bool real_timestamps = false);

// Parses exactly the emitted subset. Records outside the subset raise
// UnsupportedRecord; structural damage raises MalformedRecord with the byte
// offset of the offending record. (layer, datatype) pairs are mapped through
// known_layers; unknown pairs are appended with synthesized names. The top
// structure is the first structure no SREF points at.
layout::LayoutDb parse(std::span<const std::uint8_t> bytes,
                       const std::vector<layout::LayerId>& known_layers = layout::default_layers());

void write_file(const layout::LayoutDb& db, const std::string& path, bool real_timestamps = false);
layout::LayoutDb read_file(const std::string& path,
                           const std::vector<layout::LayerId>& known_layers = layout::default_layers());

// Excess-64 base-16 floating point used by the stream format, exposed for
// direct testing. encode rejects non-finite or unrepresentable magnitudes.
std::uint64_t encode_real8(double v);  // throws InvalidParam
double decode_real8(std::uint64_t bits);

}  // namespace rramc::gdsii
