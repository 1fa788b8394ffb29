#include "rramc/layout.hpp"

#include <cmath>
#include <map>
#include <set>

#include "rramc/errors.hpp"

namespace rramc::layout {

std::vector<LayerId> default_layers() {
  return {{"POLY", 10, 0}, {"M1", 30, 0}, {"M4", 36, 0}};
}

void Bbox::expand(std::int64_t px0, std::int64_t py0, std::int64_t px1, std::int64_t py1) {
  if (empty) {
    x0 = px0;
    y0 = py0;
    x1 = px1;
    y1 = py1;
    empty = false;
    return;
  }
  x0 = std::min(x0, px0);
  y0 = std::min(y0, py0);
  x1 = std::max(x1, px1);
  y1 = std::max(y1, py1);
}

const Structure* LayoutDb::find(std::string_view name) const {
  for (const auto& s : structures)
    if (s.name == name) return &s;
  return nullptr;
}

std::uint32_t LayoutDb::layer_index(std::string_view name) const {
  for (std::size_t i = 0; i < layers.size(); ++i)
    if (layers[i].name == name) return static_cast<std::uint32_t>(i);
  throw InvalidParam("no layer named '" + std::string(name) + "'");
}

void validate(const LayoutDb& db) {
  if (!(db.meter_per_db > 0) || !(db.user_per_db > 0))
    throw InvalidParam("layout units must be positive");
  std::set<std::string> names;
  for (const auto& s : db.structures) {
    if (s.name.empty()) throw InvalidParam("structure with empty name");
    if (!names.insert(s.name).second) throw InvalidParam("duplicate structure '" + s.name + "'");
  }
  for (const auto& s : db.structures) {
    for (const auto& r : s.rects) {
      if (!(r.x0 < r.x1 && r.y0 < r.y1))
        throw InvalidParam("degenerate rectangle in structure '" + s.name + "'");
      if (r.layer >= db.layers.size())
        throw InvalidParam("rectangle in '" + s.name + "' uses undefined layer index");
    }
    for (const auto& ref : s.refs)
      if (!db.find(ref.structure))
        throw UnresolvedReference("structure '" + s.name + "' references undefined '" +
                                  ref.structure + "'");
  }
  if (!db.structures.empty()) {
    if (db.top.empty() || !db.find(db.top))
      throw UnresolvedReference("top structure '" + db.top + "' not defined");
  }

  std::map<std::string, int> state;  // 0 unvisited, 1 in progress, 2 done
  auto dfs = [&](auto&& self, const Structure& s) -> void {
    state[s.name] = 1;
    for (const auto& ref : s.refs) {
      const Structure* child = db.find(ref.structure);
      int st = state[child->name];
      if (st == 1) throw UnresolvedReference("reference cycle through '" + child->name + "'");
      if (st == 0) self(self, *child);
    }
    state[s.name] = 2;
  };
  for (const auto& s : db.structures)
    if (state[s.name] == 0) dfs(dfs, s);
}

namespace {

Bbox structure_bbox(const LayoutDb& db, const Structure& s, std::map<std::string, Bbox>& memo) {
  auto it = memo.find(s.name);
  if (it != memo.end()) return it->second;
  Bbox b;
  for (const auto& r : s.rects) b.expand(r.x0, r.y0, r.x1, r.y1);
  for (const auto& ref : s.refs) {
    Bbox cb = structure_bbox(db, *db.find(ref.structure), memo);
    if (!cb.empty) b.expand(cb.x0 + ref.dx, cb.y0 + ref.dy, cb.x1 + ref.dx, cb.y1 + ref.dy);
  }
  memo[s.name] = b;
  return b;
}

void collect_rects(const LayoutDb& db, const Structure& s, std::int64_t dx, std::int64_t dy,
                   std::vector<Rect>& out) {
  for (const auto& r : s.rects) out.push_back(r.offset(dx, dy));
  for (const auto& ref : s.refs)
    collect_rects(db, *db.find(ref.structure), dx + ref.dx, dy + ref.dy, out);
}

}  // namespace

Bbox bbox(const LayoutDb& db) {
  validate(db);
  if (db.structures.empty()) return {};
  std::map<std::string, Bbox> memo;
  return structure_bbox(db, *db.find(db.top), memo);
}

std::vector<Rect> flatten_rects(const LayoutDb& db) {
  validate(db);
  std::vector<Rect> out;
  if (!db.structures.empty()) collect_rects(db, *db.find(db.top), 0, 0, out);
  return out;
}

std::int64_t CellTemplate::snapped_width() const {
  return static_cast<std::int64_t>(std::ceil(width_nm));
}

std::int64_t CellTemplate::snapped_height() const {
  return static_cast<std::int64_t>(std::ceil(height_nm));
}

const Rect& CellTemplate::port_rect(LineKind k) const {
  std::size_t idx = port_shape[static_cast<std::size_t>(k)];
  if (idx >= shapes.size()) throw InvalidParam("port shape index out of range");
  return shapes[idx];
}

void validate_template(const CellTemplate& t) {
  if (!(t.width_nm > 0) || !(t.height_nm > 0)) throw InvalidParam("template pitch must be positive");
  if (t.shapes.empty()) throw InvalidParam("template has no shapes");
  std::int64_t w = t.snapped_width();
  std::int64_t h = t.snapped_height();
  for (const auto& r : t.shapes) {
    if (!(r.x0 < r.x1 && r.y0 < r.y1)) throw InvalidParam("degenerate template shape");
    if (r.x0 < 0 || r.y0 < 0 || r.x1 > w || r.y1 > h)
      throw InvalidParam("template shape escapes the snapped cell footprint");
    if (r.layer >= t.layers.size()) throw InvalidParam("template shape uses undefined layer index");
  }
  const Rect& sel = t.port_rect(LineKind::SEL);
  if (sel.x0 != 0 || sel.x1 != w)
    throw InvalidParam("SEL port strip must span the full cell width");
  for (LineKind k : {LineKind::P, LineKind::N}) {
    const Rect& r = t.port_rect(k);
    if (r.y0 != 0 || r.y1 != h)
      throw InvalidParam(std::string(line_kind_name(k)) + " port strip must span the full cell height");
  }
}

CellTemplate default_template() {
  CellTemplate t;
  // 642.41 um / 128 columns and 294.42 um / 128 rows; both pitches are exact
  // binary fractions (321205/64 and 73605/32 nm) so j * pitch stays exact.
  t.width_nm = 5018.828125;
  t.height_nm = 2300.15625;
  t.layers = default_layers();
  const std::uint32_t poly = 0, m1 = 1, m4 = 2;
  std::int64_t w = t.snapped_width();   // 5019
  std::int64_t h = t.snapped_height();  // 2301
  t.shapes = {
      {m1, 0, 1000, w, 1300},     // SEL strip
      {m4, 1000, 0, 1300, h},     // P strip
      {m4, 1800, 0, 2100, h},     // N strip
      {poly, 3000, 1600, 3400, 2000},  // access gate
  };
  t.port_shape = {0, 1, 2};
  validate_template(t);
  return t;
}

std::int64_t to_nm(double um) {
  double nm = um * 1000.0;
  double rounded = std::round(nm);
  if (!std::isfinite(nm) || std::abs(nm - rounded) > 1e-6)
    throw GridViolation("coordinate " + std::to_string(um) + " um is off the 1 nm grid");
  return static_cast<std::int64_t>(rounded);
}

LayoutDb tile_array(const arch::ArrayConfig& cfg, const CellTemplate& t) {
  validate_template(t);
  if (cfg.rows == 0 || cfg.cols == 0) throw InvalidParam("array dimensions must be positive");

  LayoutDb db;
  db.layers = t.layers;

  Structure cell;
  cell.name = "rram_cell";
  cell.rects = t.shapes;
  db.structures.push_back(std::move(cell));

  Structure row;
  row.name = "rram_row";
  for (std::uint32_t j = 0; j < cfg.cols; ++j) {
    auto dx = static_cast<std::int64_t>(std::floor(double(j) * t.width_nm));
    row.refs.push_back({"rram_cell", dx, 0});
  }
  db.structures.push_back(std::move(row));

  Structure top;
  top.name = "rram_array";
  for (std::uint32_t i = 0; i < cfg.rows; ++i) {
    auto dy = static_cast<std::int64_t>(std::floor(double(i) * t.height_nm));
    top.refs.push_back({"rram_row", 0, dy});
  }
  db.structures.push_back(std::move(top));

  db.top = "rram_array";
  validate(db);
  return db;
}

double density_mbit_per_mm2(const arch::ArrayConfig& cfg, const CellTemplate& t) {
  LayoutDb db = tile_array(cfg, t);
  Bbox b = bbox(db);
  if (b.empty) throw InvalidParam("empty layout has no density");
  double area_mm2 = double(b.width()) * double(b.height()) * 1e-12;
  double mbit = double(cfg.total_bits()) / double(1u << 20);
  return mbit / area_mm2;
}

}  // namespace rramc::layout
