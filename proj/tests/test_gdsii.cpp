#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rramc/arch.hpp"
#include "rramc/errors.hpp"
#include "rramc/gdsii.hpp"
#include "rramc/layout.hpp"
#include "testutil.hpp"

using namespace rramc;
using namespace rramc::gdsii;

namespace {

layout::LayoutDb small_db() {
  return layout::tile_array(arch::derive_geometry(2, 4, 1), layout::default_template());
}

// Index of the first occurrence of a short byte pattern.
std::size_t find_bytes(const std::vector<std::uint8_t>& hay, std::initializer_list<int> pat) {
  std::vector<std::uint8_t> needle;
  for (int b : pat) needle.push_back(std::uint8_t(b));
  auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end());
  REQUIRE(it != hay.end());
  return std::size_t(it - hay.begin());
}

void rec(std::vector<std::uint8_t>& out, std::uint16_t id, std::vector<std::uint8_t> payload = {}) {
  std::uint16_t len = std::uint16_t(payload.size() + 4);
  out.push_back(std::uint8_t(len >> 8));
  out.push_back(std::uint8_t(len));
  out.push_back(std::uint8_t(id >> 8));
  out.push_back(std::uint8_t(id));
  out.insert(out.end(), payload.begin(), payload.end());
}

std::vector<std::uint8_t> be64(std::uint64_t v) {
  std::vector<std::uint8_t> p;
  for (int s = 56; s >= 0; s -= 8) p.push_back(std::uint8_t(v >> s));
  return p;
}

std::vector<std::uint8_t> str_payload(const char* s) {
  std::vector<std::uint8_t> p(s, s + std::string(s).size());
  if (p.size() % 2) p.push_back(0);
  return p;
}

// Minimal hand-rolled library preamble for crafting malformed streams.
std::vector<std::uint8_t> preamble() {
  std::vector<std::uint8_t> out;
  rec(out, 0x0002, {0x02, 0x58});                     // HEADER v600
  rec(out, 0x0102, std::vector<std::uint8_t>(24, 0)); // BGNLIB
  rec(out, 0x0206, str_payload("LIB"));               // LIBNAME
  std::vector<std::uint8_t> units = be64(encode_real8(1e-3));
  auto m = be64(encode_real8(1e-9));
  units.insert(units.end(), m.begin(), m.end());
  rec(out, 0x0305, units);                            // UNITS
  return out;
}

void begin_structure(std::vector<std::uint8_t>& out, const char* name) {
  rec(out, 0x0502, std::vector<std::uint8_t>(24, 0));  // BGNSTR
  rec(out, 0x0606, str_payload(name));                 // STRNAME
}

void sref(std::vector<std::uint8_t>& out, const char* target) {
  rec(out, 0x0A00);
  rec(out, 0x1206, str_payload(target));
  rec(out, 0x1003, std::vector<std::uint8_t>(8, 0));  // XY at the origin
  rec(out, 0x1100);
}

}  // namespace

TEST_CASE("real8 encoding") {
  CHECK(encode_real8(0.0) == 0);
  CHECK(decode_real8(0) == 0.0);
  CHECK(decode_real8(1ull << 63) == 0.0);  // sign bit with zero mantissa
  // Canonical stream encodings.
  CHECK(encode_real8(1.0) == 0x4110000000000000ull);
  CHECK(encode_real8(2.0) == 0x4120000000000000ull);
  CHECK(encode_real8(-1.0) == 0xC110000000000000ull);
  // A double mantissa always fits the 56-bit stream mantissa, so round trips
  // through the format are exact.
  for (double v : {1e-3, 1e-9, 642.41, -294.42, 3.14159265358979, 1.0 / 3.0, 1e60, 2.5e-70}) {
    CHECK(decode_real8(encode_real8(v)) == v);
  }
  CHECK_THROWS_AS(encode_real8(std::numeric_limits<double>::infinity()), InvalidParam);
  CHECK_THROWS_AS(encode_real8(std::numeric_limits<double>::quiet_NaN()), InvalidParam);
  CHECK_THROWS_AS(encode_real8(1e78), InvalidParam);   // above 16^63
  CHECK_THROWS_AS(encode_real8(1e-79), InvalidParam);  // below 16^-64
}

TEST_CASE("emit is deterministic with fixed timestamps") {
  layout::LayoutDb db = small_db();
  auto a = emit(db);
  CHECK(a == emit(db));
  // BGNLIB payload starts at byte 10; the first field is the year.
  CHECK((a[10] << 8 | a[11]) == 1970);
  auto real = emit(db, true);
  CHECK(real.size() == a.size());
  CHECK((real[10] << 8 | real[11]) >= 2025);
}

TEST_CASE("emit then parse reproduces the database exactly") {
  layout::LayoutDb db = small_db();
  layout::LayoutDb back = parse(emit(db));
  CHECK(back == db);
  CHECK(back.top == "rram_array");
  CHECK(back.user_per_db == 1e-3);
  CHECK(back.meter_per_db == 1e-9);
  // A second round trip through bytes is byte-identical.
  CHECK(emit(back) == emit(db));
}

TEST_CASE("parse synthesizes names for unknown layers") {
  layout::LayoutDb db = small_db();
  layout::LayoutDb back = parse(emit(db), {});
  REQUIRE(back.layers.size() == 3);
  // Layers appear in first-use order with L<layer>D<datatype> names.
  CHECK(back.layers[0].name == "L30D0");   // SEL strip comes first in the cell
  CHECK(back.layers[1].name == "L36D0");
  CHECK(back.layers[2].name == "L10D0");
  layout::validate(back);
  // Geometry survives; only the layer table indices are renumbered by first
  // use, so compare through the stream (layer, datatype) pairs.
  auto orig = layout::flatten_rects(db);
  auto got = layout::flatten_rects(back);
  REQUIRE(got.size() == orig.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].x0 == orig[i].x0);
    CHECK(got[i].y0 == orig[i].y0);
    CHECK(got[i].x1 == orig[i].x1);
    CHECK(got[i].y1 == orig[i].y1);
    CHECK(back.layers[got[i].layer].gds_layer == db.layers[orig[i].layer].gds_layer);
    CHECK(back.layers[got[i].layer].gds_datatype == db.layers[orig[i].layer].gds_datatype);
  }
}

TEST_CASE("file round trip") {
  testutil::TempDir dir;
  layout::LayoutDb db = small_db();
  std::string path = dir.sub("array.gds");
  write_file(db, path);
  CHECK(read_file(path) == db);
  CHECK_THROWS_AS(read_file(dir.sub("missing.gds")), IoFailure);
}

TEST_CASE("structural damage is reported with the record offset") {
  layout::LayoutDb db = small_db();
  auto bytes = emit(db);

  SUBCASE("odd record length") {
    auto bad = bytes;
    bad[1] = 5;
    try {
      parse(bad);
      FAIL("expected MalformedRecord");
    } catch (const MalformedRecord& e) {
      CHECK(e.offset == 0);
    }
  }
  SUBCASE("truncated stream") {
    auto bad = bytes;
    bad.resize(bad.size() - 3);
    CHECK_THROWS_AS(parse(bad), MalformedRecord);
  }
  SUBCASE("zero padding after ENDLIB is fine, other trailing bytes are not") {
    auto padded = bytes;
    padded.insert(padded.end(), 6, 0);
    CHECK(parse(padded) == db);
    auto bad = bytes;
    bad.push_back(0x55);
    try {
      parse(bad);
      FAIL("expected MalformedRecord");
    } catch (const MalformedRecord& e) {
      CHECK(e.offset == bytes.size());
    }
  }
  SUBCASE("boundary ring must close") {
    auto bad = bytes;
    // First BOUNDARY XY record: len 44, id 0x1003; last payload byte is the
    // low byte of the closing y coordinate.
    std::size_t xy = find_bytes(bad, {0x00, 0x2C, 0x10, 0x03});
    bad[xy + 4 + 39] ^= 1;
    try {
      parse(bad);
      FAIL("expected MalformedRecord");
    } catch (const MalformedRecord& e) {
      CHECK(e.offset == xy);
      CHECK(std::string(e.what()).find("not closed") != std::string::npos);
    }
  }
  SUBCASE("unsupported record type") {
    auto bad = bytes;
    // Rewrite the first SREF element header into a PATH element.
    std::size_t sref_at = find_bytes(bad, {0x00, 0x04, 0x0A, 0x00});
    bad[sref_at + 2] = 0x09;
    try {
      parse(bad);
      FAIL("expected UnsupportedRecord");
    } catch (const UnsupportedRecord& e) {
      CHECK(e.record_type == 0x0900);
      CHECK(std::string(e.what()).find("PATH") != std::string::npos);
    }
  }
}

TEST_CASE("hand-rolled malformed libraries") {
  SUBCASE("duplicate structure name") {
    auto bytes = preamble();
    begin_structure(bytes, "aa");
    rec(bytes, 0x0700);  // ENDSTR
    begin_structure(bytes, "aa");
    rec(bytes, 0x0700);
    rec(bytes, 0x0400);  // ENDLIB
    CHECK_THROWS_WITH_AS(parse(bytes), doctest::Contains("duplicate structure"), MalformedRecord);
  }
  SUBCASE("mutually referencing structures leave no top") {
    auto bytes = preamble();
    begin_structure(bytes, "aa");
    sref(bytes, "bb");
    rec(bytes, 0x0700);
    begin_structure(bytes, "bb");
    sref(bytes, "aa");
    rec(bytes, 0x0700);
    rec(bytes, 0x0400);
    CHECK_THROWS_WITH_AS(parse(bytes), doctest::Contains("no top structure"), MalformedRecord);
  }
  SUBCASE("reference to an undefined structure") {
    auto bytes = preamble();
    begin_structure(bytes, "aa");
    sref(bytes, "ghost");
    rec(bytes, 0x0700);
    rec(bytes, 0x0400);
    CHECK_THROWS_AS(parse(bytes), UnresolvedReference);
  }
  SUBCASE("misplaced record inside a structure") {
    auto bytes = preamble();
    begin_structure(bytes, "aa");
    rec(bytes, 0x0206, str_payload("LIB"));  // LIBNAME does not belong here
    rec(bytes, 0x0700);
    rec(bytes, 0x0400);
    CHECK_THROWS_AS(parse(bytes), MalformedRecord);
  }
  SUBCASE("empty stream") {
    std::vector<std::uint8_t> empty;
    CHECK_THROWS_AS(parse(empty), MalformedRecord);
  }
}

TEST_CASE("parse accepts an empty library") {
  auto bytes = preamble();
  rec(bytes, 0x0400);
  layout::LayoutDb db = parse(bytes);
  CHECK(db.structures.empty());
  CHECK(db.top.empty());
  CHECK(db.libname == "LIB");
}
