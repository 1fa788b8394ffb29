#include <cmath>
#include <string>

#include "rramc/layout.hpp"
#include "rramc/textio.hpp"

namespace rramc::layout {

namespace {

const char* layer_fill(const std::string& name) {
  if (name == "POLY") return "#d62728";
  if (name == "M1") return "#1f77b4";
  if (name == "M2") return "#9467bd";
  if (name == "M3") return "#8c564b";
  if (name == "M4") return "#2ca02c";
  return "#888888";
}

std::string um(double nm) { return textio::fixed(nm / 1000.0, 3); }

}  // namespace

std::string render_svg(const LayoutDb& db, const SvgOptions& opts) {
  std::vector<Rect> rects = flatten_rects(db);
  Bbox b = bbox(db);
  if (b.empty) b = {false, 0, 0, 1000, 1000};

  double w_um = double(b.width()) / 1000.0;
  double h_um = double(b.height()) / 1000.0;
  double margin = std::max(1.0, 0.04 * std::max(w_um, h_um));
  double view_w = w_um + 2 * margin;
  double view_h = h_um + 2 * margin;

  // Flip y so the database origin sits at the bottom-left of the image.
  auto sx = [&](std::int64_t x) { return textio::fixed(double(x - b.x0) / 1000.0 + margin, 4); };
  auto sy = [&](std::int64_t y) { return textio::fixed(double(b.y1 - y) / 1000.0 + margin, 4); };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + textio::fixed(view_w, 4) +
         ' ' + textio::fixed(view_h, 4) + "\" width=\"1024\" height=\"" +
         textio::fixed(1024.0 * view_h / view_w, 1) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + textio::fixed(view_w, 4) + "\" height=\"" +
         textio::fixed(view_h, 4) + "\" fill=\"#ffffff\"/>\n";

  for (std::size_t li = 0; li < db.layers.size(); ++li) {
    const LayerId& layer = db.layers[li];
    out += "<g fill=\"" + std::string(layer_fill(layer.name)) + "\" fill-opacity=\"0.65\" id=\"layer_" +
           layer.name + "\">\n";
    for (const Rect& r : rects) {
      if (r.layer != li) continue;
      out += "<rect x=\"" + sx(r.x0) + "\" y=\"" + sy(r.y1) + "\" width=\"" +
             um(double(r.width())) + "\" height=\"" + um(double(r.height())) + "\"/>\n";
    }
    out += "</g>\n";
  }

  double font = std::max(0.02 * view_h, 6.0 * view_h / 1024.0);
  if (opts.legend && !db.layers.empty()) {
    double row_h = font * 1.4;
    double box = font;
    double lw = font * 9;
    double lh = row_h * double(db.layers.size()) + font * 0.6;
    out += "<g id=\"legend\">\n";
    out += "<rect x=\"" + textio::fixed(margin * 0.25, 4) + "\" y=\"" + textio::fixed(margin * 0.25, 4) +
           "\" width=\"" + textio::fixed(lw, 4) + "\" height=\"" + textio::fixed(lh, 4) +
           "\" fill=\"#ffffff\" fill-opacity=\"0.85\" stroke=\"#000000\" stroke-width=\"" +
           textio::fixed(font * 0.08, 4) + "\"/>\n";
    for (std::size_t li = 0; li < db.layers.size(); ++li) {
      const LayerId& layer = db.layers[li];
      double y = margin * 0.25 + row_h * double(li) + font * 0.5;
      out += "<rect x=\"" + textio::fixed(margin * 0.25 + font * 0.5, 4) + "\" y=\"" +
             textio::fixed(y, 4) + "\" width=\"" + textio::fixed(box, 4) + "\" height=\"" +
             textio::fixed(box * 0.8, 4) + "\" fill=\"" + layer_fill(layer.name) +
             "\" fill-opacity=\"0.65\"/>\n";
      out += "<text x=\"" + textio::fixed(margin * 0.25 + font * 2.0, 4) + "\" y=\"" +
             textio::fixed(y + box * 0.7, 4) + "\" font-family=\"monospace\" font-size=\"" +
             textio::fixed(font, 4) + "\">" + layer.name + " (" + std::to_string(layer.gds_layer) +
             "/" + std::to_string(layer.gds_datatype) + ")</text>\n";
    }
    out += "</g>\n";
  }

  if (opts.scale_bar) {
    double bar = std::pow(10.0, std::floor(std::log10(std::max(w_um, 1.0) / 5.0)));
    if (!(bar > 0) || !std::isfinite(bar)) bar = 1.0;
    double x0 = margin;
    double y0 = view_h - margin * 0.45;
    out += "<g id=\"scale_bar\">\n";
    out += "<rect x=\"" + textio::fixed(x0, 4) + "\" y=\"" + textio::fixed(y0, 4) + "\" width=\"" +
           textio::fixed(bar, 4) + "\" height=\"" + textio::fixed(font * 0.35, 4) +
           "\" fill=\"#000000\"/>\n";
    out += "<text x=\"" + textio::fixed(x0 + bar + font * 0.5, 4) + "\" y=\"" +
           textio::fixed(y0 + font * 0.35, 4) + "\" font-family=\"monospace\" font-size=\"" +
           textio::fixed(font, 4) + "\">" + textio::fixed(bar, bar < 1.0 ? 1 : 0) + " um</text>\n";
    out += "</g>\n";
  }

  out += "</svg>\n";
  return out;
}

}  // namespace rramc::layout
