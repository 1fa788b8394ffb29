#include "rramc/gdsii.hpp"

#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <map>
#include <set>

#include "rramc/errors.hpp"

namespace rramc::gdsii {

namespace {

// Record identifiers: record type byte << 8 | data type byte.
enum RecordId : std::uint16_t {
  kHeader = 0x0002,
  kBgnLib = 0x0102,
  kLibName = 0x0206,
  kUnits = 0x0305,
  kEndLib = 0x0400,
  kBgnStr = 0x0502,
  kStrName = 0x0606,
  kEndStr = 0x0700,
  kBoundary = 0x0800,
  kPath = 0x0900,
  kSref = 0x0A00,
  kAref = 0x0B00,
  kText = 0x0C00,
  kLayer = 0x0D02,
  kDatatype = 0x0E02,
  kWidth = 0x0F03,
  kXy = 0x1003,
  kEndEl = 0x1100,
  kSname = 0x1206,
  kColRow = 0x1302,
  kNode = 0x1500,
  kTextType = 0x1602,
  kPresentation = 0x1701,
  kString = 0x1906,
  kStrans = 0x1A01,
  kMag = 0x1B05,
  kAngle = 0x1C05,
  kRefLibs = 0x1F06,
  kFonts = 0x2006,
  kPathType = 0x2102,
  kGenerations = 0x2202,
  kAttrTable = 0x2306,
  kElFlags = 0x2601,
  kNodeType = 0x2A02,
  kPropAttr = 0x2B02,
  kPropValue = 0x2C06,
  kBox = 0x2D00,
  kBoxType = 0x2E02,
  kPlex = 0x2F03,
};

const char* record_name(std::uint16_t id) {
  switch (id >> 8) {
    case 0x00: return "HEADER";
    case 0x01: return "BGNLIB";
    case 0x02: return "LIBNAME";
    case 0x03: return "UNITS";
    case 0x04: return "ENDLIB";
    case 0x05: return "BGNSTR";
    case 0x06: return "STRNAME";
    case 0x07: return "ENDSTR";
    case 0x08: return "BOUNDARY";
    case 0x09: return "PATH";
    case 0x0A: return "SREF";
    case 0x0B: return "AREF";
    case 0x0C: return "TEXT";
    case 0x0D: return "LAYER";
    case 0x0E: return "DATATYPE";
    case 0x10: return "XY";
    case 0x11: return "ENDEL";
    case 0x12: return "SNAME";
    case 0x1A: return "STRANS";
    default: return "record";
  }
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v & 0xff));
}

void put32(std::vector<std::uint8_t>& out, std::int32_t v) {
  auto u = static_cast<std::uint32_t>(v);
  out.push_back(std::uint8_t(u >> 24));
  out.push_back(std::uint8_t(u >> 16));
  out.push_back(std::uint8_t(u >> 8));
  out.push_back(std::uint8_t(u));
}

void put64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(std::uint8_t(v >> shift));
}

void record(std::vector<std::uint8_t>& out, std::uint16_t id,
            const std::vector<std::uint8_t>& payload = {}) {
  std::size_t len = payload.size() + 4;
  put16(out, static_cast<std::uint16_t>(len));
  put16(out, id);
  out.insert(out.end(), payload.begin(), payload.end());
}

void string_record(std::vector<std::uint8_t>& out, std::uint16_t id, const std::string& s) {
  std::vector<std::uint8_t> payload(s.begin(), s.end());
  if (payload.size() % 2) payload.push_back(0);  // records are even-length
  record(out, id, payload);
}

std::vector<std::uint8_t> timestamp_payload(bool real) {
  std::int16_t fields[6] = {1970, 1, 1, 0, 0, 0};
  if (real) {
    std::time_t now = std::time(nullptr);
    std::tm tm_buf{};
    gmtime_r(&now, &tm_buf);
    fields[0] = static_cast<std::int16_t>(tm_buf.tm_year + 1900);
    fields[1] = static_cast<std::int16_t>(tm_buf.tm_mon + 1);
    fields[2] = static_cast<std::int16_t>(tm_buf.tm_mday);
    fields[3] = static_cast<std::int16_t>(tm_buf.tm_hour);
    fields[4] = static_cast<std::int16_t>(tm_buf.tm_min);
    fields[5] = static_cast<std::int16_t>(tm_buf.tm_sec);
  }
  std::vector<std::uint8_t> payload;
  for (int rep = 0; rep < 2; ++rep)  // last modification and last access
    for (std::int16_t f : fields) put16(payload, static_cast<std::uint16_t>(f));
  return payload;
}

std::int32_t checked_coord(std::int64_t nm) {
  if (nm < INT32_MIN || nm > INT32_MAX)
    throw GridViolation("coordinate " + std::to_string(nm) + " nm exceeds the stream coordinate range");
  return static_cast<std::int32_t>(nm);
}

}  // namespace

std::uint64_t encode_real8(double v) {
  if (!std::isfinite(v)) throw InvalidParam("cannot encode non-finite real");
  if (v == 0.0) return 0;
  std::uint64_t sign = 0;
  if (v < 0) {
    sign = 1ull << 63;
    v = -v;
  }
  int exp16 = 0;
  while (v >= 1.0) {
    v /= 16.0;
    ++exp16;
  }
  while (v < 1.0 / 16.0) {
    v *= 16.0;
    --exp16;
  }
  // v is now in [1/16, 1): 56-bit mantissa with rounding.
  auto mantissa = static_cast<std::uint64_t>(std::llround(std::ldexp(v, 56)));
  if (mantissa >= (1ull << 56)) {
    mantissa >>= 4;
    ++exp16;
  }
  int biased = exp16 + 64;
  if (biased < 0 || biased > 127) throw InvalidParam("real magnitude outside representable range");
  return sign | (std::uint64_t(biased) << 56) | mantissa;
}

double decode_real8(std::uint64_t bits) {
  double sign = (bits >> 63) ? -1.0 : 1.0;
  int biased = int((bits >> 56) & 0x7f);
  std::uint64_t mantissa = bits & ((1ull << 56) - 1);
  if (mantissa == 0) return 0.0;
  return sign * std::ldexp(double(mantissa), 4 * (biased - 64) - 56);
}

std::vector<std::uint8_t> emit(const layout::LayoutDb& db, bool real_timestamps) {
  layout::validate(db);
  std::vector<std::uint8_t> out;

  {
    std::vector<std::uint8_t> p;
    put16(p, 600);  // stream version
    record(out, kHeader, p);
  }
  record(out, kBgnLib, timestamp_payload(real_timestamps));
  string_record(out, kLibName, db.libname);
  {
    std::vector<std::uint8_t> p;
    put64(p, encode_real8(db.user_per_db));
    put64(p, encode_real8(db.meter_per_db));
    record(out, kUnits, p);
  }

  for (const auto& s : db.structures) {
    record(out, kBgnStr, timestamp_payload(real_timestamps));
    string_record(out, kStrName, s.name);
    for (const auto& r : s.rects) {
      const layout::LayerId& layer = db.layers[r.layer];
      record(out, kBoundary);
      {
        std::vector<std::uint8_t> p;
        put16(p, layer.gds_layer);
        record(out, kLayer, p);
      }
      {
        std::vector<std::uint8_t> p;
        put16(p, layer.gds_datatype);
        record(out, kDatatype, p);
      }
      {
        std::vector<std::uint8_t> p;
        std::int32_t x0 = checked_coord(r.x0), y0 = checked_coord(r.y0);
        std::int32_t x1 = checked_coord(r.x1), y1 = checked_coord(r.y1);
        put32(p, x0); put32(p, y0);
        put32(p, x1); put32(p, y0);
        put32(p, x1); put32(p, y1);
        put32(p, x0); put32(p, y1);
        put32(p, x0); put32(p, y0);
        record(out, kXy, p);
      }
      record(out, kEndEl);
    }
    for (const auto& ref : s.refs) {
      record(out, kSref);
      string_record(out, kSname, ref.structure);
      {
        std::vector<std::uint8_t> p;
        put32(p, checked_coord(ref.dx));
        put32(p, checked_coord(ref.dy));
        record(out, kXy, p);
      }
      record(out, kEndEl);
    }
    record(out, kEndStr);
  }
  record(out, kEndLib);
  return out;
}

namespace {

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  struct Record {
    std::uint16_t id = 0;
    std::size_t offset = 0;
    std::span<const std::uint8_t> payload;
  };

  bool at_end() const { return pos >= bytes.size(); }

  Record next() {
    std::size_t off = pos;
    if (bytes.size() - pos < 4) throw MalformedRecord("truncated record header", off);
    std::uint16_t len = std::uint16_t(bytes[pos] << 8 | bytes[pos + 1]);
    std::uint16_t id = std::uint16_t(bytes[pos + 2] << 8 | bytes[pos + 3]);
    if (len < 4 || len % 2 != 0) throw MalformedRecord("bad record length", off);
    if (pos + len > bytes.size()) throw MalformedRecord("record runs past end of stream", off);
    Record r{id, off, bytes.subspan(pos + 4, len - 4)};
    pos += len;
    return r;
  }
};

std::uint16_t get16(std::span<const std::uint8_t> p, std::size_t i) {
  return std::uint16_t(p[i] << 8 | p[i + 1]);
}

std::int32_t get32(std::span<const std::uint8_t> p, std::size_t i) {
  std::uint32_t u = std::uint32_t(p[i]) << 24 | std::uint32_t(p[i + 1]) << 16 |
                    std::uint32_t(p[i + 2]) << 8 | std::uint32_t(p[i + 3]);
  return static_cast<std::int32_t>(u);
}

std::uint64_t get64(std::span<const std::uint8_t> p, std::size_t i) {
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v = v << 8 | p[i + k];
  return v;
}

std::string get_string(std::span<const std::uint8_t> p) {
  std::string s(p.begin(), p.end());
  while (!s.empty() && s.back() == '\0') s.pop_back();
  return s;
}

// The only element kinds inside the emitted subset.
bool known_unsupported(std::uint16_t id) {
  switch (id) {
    case kPath:
    case kAref:
    case kText:
    case kNode:
    case kBox:
    case kStrans:
    case kMag:
    case kAngle:
    case kWidth:
    case kColRow:
    case kTextType:
    case kPresentation:
    case kString:
    case kRefLibs:
    case kFonts:
    case kPathType:
    case kGenerations:
    case kAttrTable:
    case kElFlags:
    case kNodeType:
    case kPropAttr:
    case kPropValue:
    case kBoxType:
    case kPlex:
      return true;
    default:
      return false;
  }
}

// Snap unit values that are within rounding error of the canonical grid,
// so a write-parse cycle reproduces the exact doubles.
double snap_unit(double v, double canonical) {
  if (std::abs(v - canonical) <= 1e-9 * canonical) return canonical;
  return v;
}

}  // namespace

layout::LayoutDb parse(std::span<const std::uint8_t> bytes,
                       const std::vector<layout::LayerId>& known_layers) {
  Reader reader{bytes};
  layout::LayoutDb db;
  db.layers = known_layers;
  db.top.clear();
  db.libname.clear();

  std::map<std::pair<std::uint16_t, std::uint16_t>, std::uint32_t> layer_map;
  for (std::size_t i = 0; i < known_layers.size(); ++i)
    layer_map[{known_layers[i].gds_layer, known_layers[i].gds_datatype}] =
        static_cast<std::uint32_t>(i);
  auto map_layer = [&](std::uint16_t l, std::uint16_t d) {
    auto it = layer_map.find({l, d});
    if (it != layer_map.end()) return it->second;
    layout::LayerId synth{"L" + std::to_string(l) + "D" + std::to_string(d), l, d};
    db.layers.push_back(synth);
    auto idx = static_cast<std::uint32_t>(db.layers.size() - 1);
    layer_map[{l, d}] = idx;
    return idx;
  };

  auto expect = [&](Reader::Record& r, std::uint16_t id, std::size_t payload_size,
                    const char* what) {
    if (r.id != id) {
      if (known_unsupported(r.id))
        throw UnsupportedRecord(std::string(record_name(r.id)) +
                                    " record is outside the supported subset",
                                r.id);
      throw MalformedRecord(std::string("expected ") + what + ", found " + record_name(r.id),
                            r.offset);
    }
    if (payload_size != SIZE_MAX && r.payload.size() != payload_size)
      throw MalformedRecord(std::string(what) + " has wrong payload size", r.offset);
  };

  Reader::Record r = reader.next();
  expect(r, kHeader, 2, "HEADER");
  r = reader.next();
  expect(r, kBgnLib, 24, "BGNLIB");
  r = reader.next();
  expect(r, kLibName, SIZE_MAX, "LIBNAME");
  db.libname = get_string(r.payload);
  r = reader.next();
  expect(r, kUnits, 16, "UNITS");
  db.user_per_db = snap_unit(decode_real8(get64(r.payload, 0)), 1e-3);
  db.meter_per_db = snap_unit(decode_real8(get64(r.payload, 8)), 1e-9);

  bool ended = false;
  std::set<std::string> referenced;
  while (!ended) {
    r = reader.next();
    if (r.id == kEndLib) {
      ended = true;
      break;
    }
    expect(r, kBgnStr, 24, "BGNSTR");
    r = reader.next();
    expect(r, kStrName, SIZE_MAX, "STRNAME");
    layout::Structure s;
    s.name = get_string(r.payload);
    if (s.name.empty()) throw MalformedRecord("empty structure name", r.offset);
    if (db.find(s.name)) throw MalformedRecord("duplicate structure '" + s.name + "'", r.offset);

    for (;;) {
      r = reader.next();
      if (r.id == kEndStr) break;
      if (r.id == kBoundary) {
        expect(r, kBoundary, 0, "BOUNDARY");
        r = reader.next();
        expect(r, kLayer, 2, "LAYER");
        std::uint16_t layer = get16(r.payload, 0);
        r = reader.next();
        expect(r, kDatatype, 2, "DATATYPE");
        std::uint16_t datatype = get16(r.payload, 0);
        r = reader.next();
        expect(r, kXy, 40, "XY");
        std::int64_t xs[5], ys[5];
        for (int i = 0; i < 5; ++i) {
          xs[i] = get32(r.payload, std::size_t(i) * 8);
          ys[i] = get32(r.payload, std::size_t(i) * 8 + 4);
        }
        if (xs[4] != xs[0] || ys[4] != ys[0])
          throw MalformedRecord("boundary ring is not closed", r.offset);
        layout::Rect rect;
        rect.layer = map_layer(layer, datatype);
        rect.x0 = std::min({xs[0], xs[1], xs[2], xs[3]});
        rect.x1 = std::max({xs[0], xs[1], xs[2], xs[3]});
        rect.y0 = std::min({ys[0], ys[1], ys[2], ys[3]});
        rect.y1 = std::max({ys[0], ys[1], ys[2], ys[3]});
        if (rect.x0 >= rect.x1 || rect.y0 >= rect.y1)
          throw MalformedRecord("degenerate boundary", r.offset);
        for (int i = 0; i < 4; ++i) {
          bool horizontal = ys[i] == ys[i + 1] && xs[i] != xs[i + 1];
          bool vertical = xs[i] == xs[i + 1] && ys[i] != ys[i + 1];
          if (!horizontal && !vertical)
            throw MalformedRecord("boundary edge is not axis-parallel", r.offset);
          bool on_x = xs[i] == rect.x0 || xs[i] == rect.x1;
          bool on_y = ys[i] == rect.y0 || ys[i] == rect.y1;
          if (!on_x || !on_y) throw MalformedRecord("boundary is not a rectangle", r.offset);
        }
        r = reader.next();
        expect(r, kEndEl, 0, "ENDEL");
        s.rects.push_back(rect);
      } else if (r.id == kSref) {
        expect(r, kSref, 0, "SREF");
        r = reader.next();
        expect(r, kSname, SIZE_MAX, "SNAME");
        layout::Ref ref;
        ref.structure = get_string(r.payload);
        r = reader.next();
        expect(r, kXy, 8, "XY");
        ref.dx = get32(r.payload, 0);
        ref.dy = get32(r.payload, 4);
        r = reader.next();
        expect(r, kEndEl, 0, "ENDEL");
        referenced.insert(ref.structure);
        s.refs.push_back(ref);
      } else if (known_unsupported(r.id)) {
        throw UnsupportedRecord(std::string(record_name(r.id)) + " record is outside the supported subset",
                                r.id);
      } else {
        throw MalformedRecord(std::string("unexpected ") + record_name(r.id) + " inside structure",
                              r.offset);
      }
    }
    db.structures.push_back(std::move(s));
  }

  while (!reader.at_end()) {
    if (bytes[reader.pos] != 0)
      throw MalformedRecord("trailing bytes after ENDLIB", reader.pos);
    ++reader.pos;
  }

  for (const auto& s : db.structures) {
    if (!referenced.contains(s.name)) {
      db.top = s.name;
      break;
    }
  }
  if (db.top.empty() && !db.structures.empty())
    throw MalformedRecord("every structure is referenced; no top structure", 0);

  layout::validate(db);
  return db;
}

void write_file(const layout::LayoutDb& db, const std::string& path, bool real_timestamps) {
  std::vector<std::uint8_t> bytes = emit(db, real_timestamps);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw IoFailure("write error on '" + path + "'");
}

layout::LayoutDb read_file(const std::string& path, const std::vector<layout::LayerId>& known_layers) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoFailure("read error on '" + path + "'");
  return parse(bytes, known_layers);
}

}  // namespace rramc::gdsii
