#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rramc/arch.hpp"
#include "rramc/lines.hpp"

namespace rramc::layout {

// Drawing layer with its stream-format (layer, datatype) pair.
struct LayerId {
  std::string name;
  std::uint16_t gds_layer = 0;
  std::uint16_t gds_datatype = 0;
  friend bool operator==(const LayerId&, const LayerId&) = default;
};

// POLY(10,0), M1(30,0), M4(36,0).
std::vector<LayerId> default_layers();

// Axis-aligned rectangle on a 1 nm integer grid. layer indexes the owning
// database's (or template's) layer table.
struct Rect {
  std::uint32_t layer = 0;
  std::int64_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  std::int64_t width() const { return x1 - x0; }
  std::int64_t height() const { return y1 - y0; }
  std::int64_t min_dim() const { return width() < height() ? width() : height(); }
  // Closed-region overlap test: sharing only an edge or corner still counts.
  bool touches(const Rect& o) const {
    return layer == o.layer && x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
  }
  Rect offset(std::int64_t dx, std::int64_t dy) const { return {layer, x0 + dx, y0 + dy, x1 + dx, y1 + dy}; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Ref {
  std::string structure;
  std::int64_t dx = 0, dy = 0;
  friend bool operator==(const Ref&, const Ref&) = default;
};

struct Structure {
  std::string name;
  std::vector<Rect> rects;
  std::vector<Ref> refs;
  friend bool operator==(const Structure&, const Structure&) = default;
};

struct Bbox {
  bool empty = true;
  std::int64_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  void expand(std::int64_t px0, std::int64_t py0, std::int64_t px1, std::int64_t py1);
  std::int64_t width() const { return empty ? 0 : x1 - x0; }
  std::int64_t height() const { return empty ? 0 : y1 - y0; }
  friend bool operator==(const Bbox&, const Bbox&) = default;
};

// Hierarchical layout database. Database unit is fixed at 1 nm
// (meter_per_db) and user units are micrometers (user_per_db db units).
struct LayoutDb {
  std::string libname = "RRAMC";
  double user_per_db = 1e-3;
  double meter_per_db = 1e-9;
  std::vector<LayerId> layers;
  std::vector<Structure> structures;
  std::string top;

  const Structure* find(std::string_view name) const;
  std::uint32_t layer_index(std::string_view name) const;  // throws InvalidParam
  friend bool operator==(const LayoutDb&, const LayoutDb&) = default;
};

// Structural checks: valid rects, in-range layer indices, resolvable and
// acyclic references, defined top.
void validate(const LayoutDb& db);

// Bounding box of the top structure with references expanded.
Bbox bbox(const LayoutDb& db);

// All rectangles of the top structure in global coordinates, depth-first,
// local rects before references.
std::vector<Rect> flatten_rects(const LayoutDb& db);

// Unit cell footprint and shapes. The pitch may be fractional nanometers;
// instance origins are floor(j * pitch) so shapes stay on grid, and shapes
// may extend to the snapped (ceil) pitch so neighboring cells keep their
// line strips electrically continuous.
struct CellTemplate {
  double width_nm = 0.0;
  double height_nm = 0.0;
  std::vector<LayerId> layers;
  std::vector<Rect> shapes;
  // Shape index of the strip carrying each line family. SEL spans the full
  // width, P and N the full height of the snapped footprint.
  std::array<std::size_t, 3> port_shape{};

  std::int64_t snapped_width() const;
  std::int64_t snapped_height() const;
  const Rect& port_rect(LineKind k) const;
  friend bool operator==(const CellTemplate&, const CellTemplate&) = default;
};

void validate_template(const CellTemplate& t);

// 180 nm class cell, 5018.828125 x 2300.15625 nm pitch:
// full-width SEL strip on M1, full-height P and N strips on M4, and the
// access transistor gate on POLY.
CellTemplate default_template();

// Micrometers to integer nanometers; rejects off-grid values.
std::int64_t to_nm(double um);  // throws GridViolation

// rows x cols instances of the template: cell structure, a row structure of
// cell references, and a top structure of row references.
LayoutDb tile_array(const arch::ArrayConfig& cfg, const CellTemplate& t);

// Storage density in megabits (2^20 bits) per square millimeter of the
// tiled array bounding box.
double density_mbit_per_mm2(const arch::ArrayConfig& cfg, const CellTemplate& t);

struct SvgOptions {
  bool legend = true;
  bool scale_bar = true;
  friend bool operator==(const SvgOptions&, const SvgOptions&) = default;
};

// Deterministic SVG rendering of the flattened top structure.
std::string render_svg(const LayoutDb& db, const SvgOptions& opts = {});

}  // namespace rramc::layout
