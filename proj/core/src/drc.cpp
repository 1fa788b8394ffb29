#include <algorithm>
#include <cctype>
#include <cmath>

#include "rramc/errors.hpp"
#include "rramc/textio.hpp"
#include "rramc/verify.hpp"

namespace rramc::verify {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = char(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double lookup(const std::vector<std::pair<std::string, double>>& table, std::string_view layer) {
  std::string key = lower(layer);
  for (const auto& [k, v] : table)
    if (k == key) return v;
  return 0.0;
}

}  // namespace

double RuleDeck::width_for(std::string_view layer) const { return lookup(min_width_um, layer); }
double RuleDeck::spacing_for(std::string_view layer) const { return lookup(min_spacing_um, layer); }

RuleDeck RuleDeck::defaults() {
  RuleDeck d;
  d.min_width_um = {{"poly", 0.18}, {"m1", 0.22}, {"m4", 0.28}};
  d.min_spacing_um = {{"poly", 0.25}, {"m1", 0.23}, {"m4", 0.28}};
  return d;
}

RuleDeck rules_from_doc(const keyval::Document& doc) {
  RuleDeck d;
  for (const auto& [key, value] : doc.entries()) {
    auto dot = key.find('.');
    if (dot == std::string::npos) throw ConfigError("rule key '" + key + "' lacks a layer prefix");
    std::string layer = lower(key.substr(0, dot));
    std::string attr = key.substr(dot + 1);
    double v = textio::parse_double(value);
    if (!(v > 0)) throw ConfigError("rule '" + key + "' must be positive");
    if (attr == "min_width_um")
      d.min_width_um.emplace_back(layer, v);
    else if (attr == "min_spacing_um")
      d.min_spacing_um.emplace_back(layer, v);
    else
      throw ConfigError("unknown rule attribute '" + attr + "'");
  }
  return d;
}

RuleDeck load_rules(const std::string& path) { return rules_from_doc(keyval::load_file(path)); }

std::string serialize(const RuleDeck& deck) {
  keyval::Document doc;
  for (const auto& [layer, v] : deck.min_width_um) doc.set(layer + ".min_width_um", textio::full(v));
  for (const auto& [layer, v] : deck.min_spacing_um)
    doc.set(layer + ".min_spacing_um", textio::full(v));
  return doc.serialize();
}

namespace {

// Non-negative axis gaps between two rectangles; both zero means the closed
// regions touch or overlap.
void gaps(const layout::Rect& a, const layout::Rect& b, std::int64_t& gx, std::int64_t& gy) {
  gx = std::max<std::int64_t>({0, b.x0 - a.x1, a.x0 - b.x1});
  gy = std::max<std::int64_t>({0, b.y0 - a.y1, a.y0 - b.y1});
}

bool rect_less(const layout::Rect& a, const layout::Rect& b) {
  if (a.x0 != b.x0) return a.x0 < b.x0;
  if (a.y0 != b.y0) return a.y0 < b.y0;
  if (a.x1 != b.x1) return a.x1 < b.x1;
  return a.y1 < b.y1;
}

}  // namespace

std::vector<Violation> run_drc(const layout::LayoutDb& db, const RuleDeck& deck) {
  std::vector<layout::Rect> rects = layout::flatten_rects(db);
  std::vector<Violation> out;

  for (std::size_t li = 0; li < db.layers.size(); ++li) {
    const std::string& layer = db.layers[li].name;
    double w_um = deck.width_for(layer);
    double s_um = deck.spacing_for(layer);
    double w_nm = w_um * 1000.0;
    double s_nm = s_um * 1000.0;

    std::vector<layout::Rect> mine;
    for (const auto& r : rects)
      if (r.layer == li) mine.push_back(r);
    std::sort(mine.begin(), mine.end(), rect_less);

    if (w_um > 0) {
      for (const auto& r : mine) {
        if (double(r.min_dim()) < w_nm) {
          out.push_back({ViolationKind::Width, layer, r, r, double(r.min_dim()) / 1000.0, w_um});
        }
      }
    }

    if (s_um > 0 && !mine.empty()) {
      // Sweep over x: a rect only needs comparing against actives whose x
      // extent ends within the spacing window.
      auto margin = static_cast<std::int64_t>(std::ceil(s_nm));
      std::vector<std::size_t> active;
      for (std::size_t i = 0; i < mine.size(); ++i) {
        const layout::Rect& r = mine[i];
        std::erase_if(active, [&](std::size_t j) { return mine[j].x1 < r.x0 - margin; });
        for (std::size_t j : active) {
          const layout::Rect& o = mine[j];
          std::int64_t gx, gy;
          gaps(r, o, gx, gy);
          if (gx == 0 && gy == 0) continue;  // touching or overlapping: same net
          double d2 = double(gx) * double(gx) + double(gy) * double(gy);
          if (d2 < s_nm * s_nm) {
            const layout::Rect& a = rect_less(o, r) ? o : r;
            const layout::Rect& b = rect_less(o, r) ? r : o;
            out.push_back({ViolationKind::Spacing, layer, a, b, std::sqrt(d2) / 1000.0, s_um});
          }
        }
        active.push_back(i);
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    if (a.layer != b.layer) return a.layer < b.layer;
    if (a.kind != b.kind) return a.kind < b.kind;
    if (!(a.a == b.a)) return rect_less(a.a, b.a);
    return rect_less(a.b, b.b);
  });
  return out;
}

namespace {

std::string rect_str(const layout::Rect& r) {
  return "(" + textio::fixed(double(r.x0) / 1000.0, 3) + "," + textio::fixed(double(r.y0) / 1000.0, 3) +
         "," + textio::fixed(double(r.x1) / 1000.0, 3) + "," + textio::fixed(double(r.y1) / 1000.0, 3) +
         ")";
}

}  // namespace

std::string drc_report_text(const std::vector<Violation>& violations, const RuleDeck& deck) {
  std::string out;
  out += "design rule check: " + std::to_string(violations.size()) +
         (violations.size() == 1 ? " violation\n" : " violations\n");
  out += "rules:\n";
  for (const auto& [layer, v] : deck.min_width_um)
    out += "  " + layer + ".min_width_um = " + textio::fixed(v, 3) + "\n";
  for (const auto& [layer, v] : deck.min_spacing_um)
    out += "  " + layer + ".min_spacing_um = " + textio::fixed(v, 3) + "\n";
  for (const auto& v : violations) {
    out += (v.kind == ViolationKind::Width ? "width " : "spacing ");
    out += v.layer + " a=" + rect_str(v.a);
    if (!(v.b == v.a)) out += " b=" + rect_str(v.b);
    out += " measured_um=" + textio::fixed(v.measured_um, 4) +
           " required_um=" + textio::fixed(v.required_um, 4) + "\n";
  }
  return out;
}

std::string drc_report_csv(const std::vector<Violation>& violations) {
  std::string out = "kind,layer,ax0_um,ay0_um,ax1_um,ay1_um,bx0_um,by0_um,bx1_um,by1_um,"
                    "measured_um,required_um\n";
  for (const auto& v : violations) {
    out += (v.kind == ViolationKind::Width ? "width," : "spacing,");
    out += v.layer + ",";
    for (const layout::Rect* r : {&v.a, &v.b}) {
      out += textio::fixed(double(r->x0) / 1000.0, 3) + "," + textio::fixed(double(r->y0) / 1000.0, 3) +
             "," + textio::fixed(double(r->x1) / 1000.0, 3) + "," +
             textio::fixed(double(r->y1) / 1000.0, 3) + ",";
    }
    out += textio::fixed(v.measured_um, 4) + "," + textio::fixed(v.required_um, 4) + "\n";
  }
  return out;
}

}  // namespace rramc::verify
