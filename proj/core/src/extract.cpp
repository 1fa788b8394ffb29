#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>

#include "rramc/errors.hpp"
#include "rramc/textio.hpp"
#include "rramc/verify.hpp"

namespace rramc::verify {

namespace {

struct RectUnion {
  std::vector<std::uint32_t> parent;

  explicit RectUnion(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = std::uint32_t(i);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;
  }
};

// Per-layer query index over the flattened rectangles.
struct LayerIndex {
  std::vector<std::uint32_t> by_x0;  // rect indices sorted by x0
  std::vector<std::uint32_t> by_y0;
  std::int64_t max_w = 0;
  std::int64_t max_h = 0;
};

bool touches_xy(const layout::Rect& a, const layout::Rect& b) {
  return a.x0 <= b.x1 && b.x0 <= a.x1 && a.y0 <= b.y1 && b.y0 <= a.y1;
}

}  // namespace

ConnectivityGraph extract_connectivity(const layout::LayoutDb& db, const layout::CellTemplate& t) {
  layout::validate_template(t);
  std::vector<layout::Rect> rects = layout::flatten_rects(db);
  if (rects.empty()) throw InvalidParam("layout has no geometry to extract");

  layout::Bbox b = layout::bbox(db);
  auto rows = std::uint32_t(std::llround(double(b.y1) / t.height_nm));
  auto cols = std::uint32_t(std::llround(double(b.x1) / t.width_nm));
  if (rows == 0 || cols == 0) throw InvalidParam("layout is smaller than one cell pitch");

  // Merge touching same-layer rectangles into nets with an x sweep.
  RectUnion uf(rects.size());
  std::vector<LayerIndex> index(db.layers.size());
  for (std::uint32_t i = 0; i < rects.size(); ++i) {
    LayerIndex& li = index[rects[i].layer];
    li.by_x0.push_back(i);
    li.by_y0.push_back(i);
    li.max_w = std::max(li.max_w, rects[i].width());
    li.max_h = std::max(li.max_h, rects[i].height());
  }
  for (LayerIndex& li : index) {
    std::sort(li.by_x0.begin(), li.by_x0.end(),
              [&](std::uint32_t a, std::uint32_t c) { return rects[a].x0 < rects[c].x0; });
    std::sort(li.by_y0.begin(), li.by_y0.end(),
              [&](std::uint32_t a, std::uint32_t c) { return rects[a].y0 < rects[c].y0; });
    std::vector<std::uint32_t> active;
    for (std::uint32_t i : li.by_x0) {
      std::erase_if(active, [&](std::uint32_t j) { return rects[j].x1 < rects[i].x0; });
      for (std::uint32_t j : active)
        if (touches_xy(rects[i], rects[j])) uf.unite(i, j);
      active.push_back(i);
    }
  }

  // Binds a translated port strip to the net whose geometry it touches.
  auto bind = [&](const layout::Rect& q, const std::string& what) -> std::uint32_t {
    if (q.layer >= index.size()) throw InvalidParam("port layer out of range");
    const LayerIndex& li = index[q.layer];
    if (q.width() <= q.height()) {
      auto lo = std::lower_bound(li.by_x0.begin(), li.by_x0.end(), q.x0 - li.max_w,
                                 [&](std::uint32_t a, std::int64_t x) { return rects[a].x0 < x; });
      for (auto it = lo; it != li.by_x0.end() && rects[*it].x0 <= q.x1; ++it)
        if (touches_xy(rects[*it], q)) return uf.find(*it);
    } else {
      auto lo = std::lower_bound(li.by_y0.begin(), li.by_y0.end(), q.y0 - li.max_h,
                                 [&](std::uint32_t a, std::int64_t y) { return rects[a].y0 < y; });
      for (auto it = lo; it != li.by_y0.end() && rects[*it].y0 <= q.y1; ++it)
        if (touches_xy(rects[*it], q)) return uf.find(*it);
    }
    throw DisconnectedPort(what + " touches no metal");
  };

  ConnectivityGraph g;
  std::map<std::uint32_t, std::uint32_t> net_of_root;
  struct LabelInfo {
    LineKind kind;
    std::uint32_t index;
  };
  std::vector<std::vector<LabelInfo>> labels;  // per net

  auto net_for_root = [&](std::uint32_t root) {
    auto it = net_of_root.find(root);
    if (it != net_of_root.end()) return it->second;
    auto id = std::uint32_t(g.net_names.size());
    g.net_names.push_back("");
    labels.emplace_back();
    net_of_root.emplace(root, id);
    return id;
  };

  int pr = textio::index_width(rows);
  int pc = textio::index_width(cols);
  struct CellNets {
    std::uint32_t sel, p, n;
  };
  std::vector<CellNets> cells;
  cells.reserve(std::size_t(rows) * cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    auto oy = static_cast<std::int64_t>(std::floor(double(i) * t.height_nm));
    for (std::uint32_t j = 0; j < cols; ++j) {
      auto ox = static_cast<std::int64_t>(std::floor(double(j) * t.width_nm));
      CellNets cn{};
      for (LineKind k : {LineKind::SEL, LineKind::P, LineKind::N}) {
        layout::Rect q = t.port_rect(k).offset(ox, oy);
        std::string what = std::string(line_kind_name(k)) + " port of cell (" +
                           std::to_string(i) + "," + std::to_string(j) + ")";
        std::uint32_t net = net_for_root(bind(q, what));
        std::uint32_t line_index = (k == LineKind::SEL) ? i : j;
        labels[net].push_back({k, line_index});
        if (k == LineKind::SEL)
          cn.sel = net;
        else if (k == LineKind::P)
          cn.p = net;
        else
          cn.n = net;
      }
      cells.push_back(cn);
    }
  }

  // A net keeps its line name only when the labeling is unambiguous in both
  // directions; split or shorted nets fall back to generic names.
  std::map<std::string, std::uint32_t> claim_count;
  std::vector<std::string> wanted(g.net_names.size());
  for (std::size_t net = 0; net < labels.size(); ++net) {
    bool uniform = !labels[net].empty();
    for (const LabelInfo& l : labels[net])
      if (l.kind != labels[net][0].kind || l.index != labels[net][0].index) uniform = false;
    if (uniform) {
      const LabelInfo& l = labels[net][0];
      wanted[net] = line_name(l.kind, l.index, l.kind == LineKind::SEL ? pr : pc);
      ++claim_count[wanted[net]];
    }
  }
  for (std::size_t net = 0; net < g.net_names.size(); ++net) {
    if (!wanted[net].empty() && claim_count[wanted[net]] == 1)
      g.net_names[net] = wanted[net];
    else
      g.net_names[net] = "net" + std::to_string(net);
  }

  auto bulk = std::uint32_t(g.net_names.size());
  g.net_names.push_back("GND_BULK");
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      const CellNets& cn = cells[std::size_t(i) * cols + j];
      auto mid = std::uint32_t(g.net_names.size());
      g.net_names.push_back("mid_" + textio::pad(i, pr) + "_" + textio::pad(j, pc));
      std::string base = "cell_" + textio::pad(i, pr) + "_" + textio::pad(j, pc);
      g.devices.push_back({netlist::DeviceKind::Memristor, base + ".mem", {cn.p, mid}});
      g.devices.push_back({netlist::DeviceKind::Nmos, base + ".acc", {mid, cn.sel, cn.n, bulk}});
    }
  }
  return g;
}

layout::LayoutDb inject_fault(const layout::LayoutDb& db, const layout::CellTemplate& t,
                              std::uint64_t seed, FaultInfo* info) {
  layout::validate_template(t);
  std::vector<layout::Rect> rects = layout::flatten_rects(db);
  if (rects.empty()) throw InvalidParam("cannot inject a fault into empty layout");

  std::vector<bool> port_layer(db.layers.size(), false);
  for (LineKind k : {LineKind::SEL, LineKind::P, LineKind::N})
    port_layer[t.port_rect(k).layer] = true;
  std::uint32_t column_layer = t.port_rect(LineKind::P).layer;

  std::mt19937_64 rng(seed);
  auto pick = [&](std::uint64_t n) { return std::size_t(rng() % n); };
  int kind = int(rng() % 3);

  FaultInfo fi;
  auto shrink = [&](std::size_t idx) {
    layout::Rect& r = rects[idx];
    fi.kind = "shrink";
    fi.victim = r;
    if (r.width() <= r.height()) {
      std::int64_t w = std::max<std::int64_t>(1, r.width() * 2 / 5);
      r.x1 = r.x0 + w;
    } else {
      std::int64_t h = std::max<std::int64_t>(1, r.height() * 2 / 5);
      r.y1 = r.y0 + h;
    }
    fi.description = "shrank " + db.layers[r.layer].name + " rect to " +
                     std::to_string(r.min_dim()) + " nm minimum dimension";
  };

  if (kind == 0) {
    shrink(pick(rects.size()));
  } else if (kind == 1) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < rects.size(); ++i)
      if (port_layer[rects[i].layer]) candidates.push_back(i);
    // Deleting an end segment leaves the line whole and every port still
    // seam-bound to a neighbor, which neither DRC nor LVS can see. Only an
    // interior segment (touching two same-layer neighbors) is guaranteed to
    // split its net; when the chains are too short, shrink instead.
    auto interior = [&](std::size_t idx) {
      int touching = 0;
      for (std::size_t i = 0; i < rects.size() && touching < 2; ++i)
        if (i != idx && rects[i].touches(rects[idx])) ++touching;
      return touching >= 2;
    };
    std::size_t chosen = rects.size();
    for (int attempt = 0; attempt < 32 && chosen == rects.size(); ++attempt) {
      std::size_t idx = candidates[pick(candidates.size())];
      if (interior(idx)) chosen = idx;
    }
    if (chosen == rects.size()) {
      shrink(candidates[pick(candidates.size())]);
    } else {
      fi.kind = "delete";
      fi.victim = rects[chosen];
      fi.description = "deleted a " + db.layers[rects[chosen].layer].name + " line strip";
      rects.erase(rects.begin() + std::ptrdiff_t(chosen));
    }
  } else {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < rects.size(); ++i)
      if (rects[i].layer == column_layer) candidates.push_back(i);
    std::size_t idx = candidates[pick(candidates.size())];
    const layout::Rect v = rects[idx];
    std::int64_t best_gap = INT64_MAX;
    int dir = 0;
    for (std::size_t i = 0; i < rects.size(); ++i) {
      if (i == idx || rects[i].layer != v.layer) continue;
      const layout::Rect& o = rects[i];
      if (o.y0 > v.y1 || v.y0 > o.y1) continue;  // no vertical overlap
      if (o.x0 >= v.x1 && o.x0 - v.x1 > 0 && o.x0 - v.x1 < best_gap) {
        best_gap = o.x0 - v.x1;
        dir = 1;
      }
      if (v.x0 >= o.x1 && v.x0 - o.x1 > 0 && v.x0 - o.x1 < best_gap) {
        best_gap = v.x0 - o.x1;
        dir = -1;
      }
    }
    std::int64_t shift = (dir == 0) ? 0 : best_gap - 140;
    if (shift <= 0) {
      shrink(idx);
    } else {
      fi.kind = "move";
      fi.victim = v;
      rects[idx].x0 += dir * shift;
      rects[idx].x1 += dir * shift;
      fi.description = "moved a " + db.layers[v.layer].name + " strip to a 140 nm gap";
    }
  }

  layout::LayoutDb out;
  out.libname = db.libname;
  out.layers = db.layers;
  layout::Structure s;
  s.name = "rram_array_flat";
  s.rects = std::move(rects);
  out.structures.push_back(std::move(s));
  out.top = "rram_array_flat";
  layout::validate(out);
  if (info) *info = fi;
  return out;
}

}  // namespace rramc::verify
