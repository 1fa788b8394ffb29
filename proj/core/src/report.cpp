#include "rramc/report.hpp"

#include <algorithm>
#include <cmath>

#include "rramc/errors.hpp"
#include "rramc/fileio.hpp"
#include "rramc/textio.hpp"

namespace rramc::report {

SweepTable sweep_parasitics(const std::vector<std::uint32_t>& sizes,
                            const parasitics::ParasiticRates& rates) {
  rates.validate();
  if (sizes.empty()) throw InvalidParam("sweep needs at least one size");
  SweepTable table;
  for (std::uint32_t n : sizes) {
    if (n == 0) throw InvalidParam("sweep sizes must be positive");
    for (LineKind k : {LineKind::SEL, LineKind::N, LineKind::P}) {
      table.push_back({n, line_kind_name(k), "capacitance_total",
                       parasitics::line_capacitance(rates, k, n), "F"});
      table.push_back({n, line_kind_name(k), "resistance_total",
                       parasitics::line_resistance(rates, k, n), "ohm"});
    }
  }
  return table;
}

LinearFit linear_fit(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) throw DegenerateFit("linear fit needs at least two points");
  bool distinct = false;
  for (const auto& [x, y] : pts) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DegenerateFit("non-finite fit input");
    if (x != pts.front().first) distinct = true;
  }
  if (!distinct) throw DegenerateFit("linear fit needs two distinct abscissae");

  double n = double(pts.size());
  long double sx = 0, sxx = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sxx += (long double)x * x;
  }
  long double det = (long double)n * sxx - sx * sx;

  // Solves the normal equations for the residual vector, then folds the
  // correction back in. Starting from zero this is plain least squares; the
  // extra passes cancel the rounding left by the first solve.
  double m = 0.0, b = 0.0;
  for (int pass = 0; pass < 5; ++pass) {
    long double sr = 0, sxr = 0;
    for (const auto& [x, y] : pts) {
      double r = std::fma(-m, x, y) - b;
      sr += r;
      sxr += (long double)x * r;
    }
    auto dm = double((n * sxr - sx * sr) / det);
    auto db = double((sxx * sr - sx * sxr) / det);
    m += dm;
    b += db;
    if (dm == 0.0 && db == 0.0) break;
  }

  long double ss_res = 0, ss_tot = 0, mean = 0;
  for (const auto& [x, y] : pts) mean += y;
  mean /= pts.size();
  for (const auto& [x, y] : pts) {
    long double r = (long double)y - ((long double)m * x + b);
    ss_res += r * r;
    long double d = (long double)y - mean;
    ss_tot += d * d;
  }
  LinearFit fit;
  fit.slope = m;
  fit.intercept = b;
  fit.r_squared = ss_tot > 0 ? double(1.0L - ss_res / ss_tot) : 1.0;
  return fit;
}

ExpFit fit_exponential(const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::pair<double, double>> logged;
  logged.reserve(pts.size());
  for (const auto& [x, y] : pts) {
    if (!(y > 0)) throw DegenerateFit("exponential fit needs positive ordinates");
    logged.emplace_back(x, std::log(y));
  }
  LinearFit lf = linear_fit(logged);
  ExpFit fit;
  fit.a = std::exp(lf.intercept);
  fit.k = lf.slope;
  fit.r_squared = lf.r_squared;
  return fit;
}

std::array<LineFits, 3> fit_sweep(const SweepTable& table) {
  std::array<LineFits, 3> fits{};
  for (LineKind k : {LineKind::SEL, LineKind::P, LineKind::N}) {
    std::vector<std::pair<double, double>> cap, res;
    for (const auto& row : table) {
      if (row.line != line_kind_name(k)) continue;
      if (row.metric == "capacitance_total") cap.emplace_back(double(row.n_cells), row.value);
      if (row.metric == "resistance_total") res.emplace_back(double(row.n_cells), row.value);
    }
    fits[std::size_t(k)].capacitance = linear_fit(cap);
    fits[std::size_t(k)].resistance = linear_fit(res);
  }
  return fits;
}

std::string parasitics_csv(const SweepTable& table, const std::array<LineFits, 3>& fits) {
  std::string out = "n_cells,line,metric,value,unit\n";
  for (const auto& row : table) {
    out += std::to_string(row.n_cells) + "," + row.line + "," + row.metric + "," +
           textio::full(row.value) + "," + row.unit + "\n";
  }
  // Fit rows use n_cells = 0 to stay within the same schema.
  for (LineKind k : {LineKind::SEL, LineKind::N, LineKind::P}) {
    const LineFits& f = fits[std::size_t(k)];
    const char* line = line_kind_name(k);
    out += std::string("0,") + line + ",capacitance_slope," + textio::full(f.capacitance.slope) +
           ",F_per_cell\n";
    out += std::string("0,") + line + ",capacitance_intercept," +
           textio::full(f.capacitance.intercept) + ",F\n";
    out += std::string("0,") + line + ",capacitance_r_squared," +
           textio::full(f.capacitance.r_squared) + ",1\n";
    out += std::string("0,") + line + ",resistance_slope," + textio::full(f.resistance.slope) +
           ",ohm_per_cell\n";
    out += std::string("0,") + line + ",resistance_intercept," +
           textio::full(f.resistance.intercept) + ",ohm\n";
    out += std::string("0,") + line + ",resistance_r_squared," +
           textio::full(f.resistance.r_squared) + ",1\n";
  }
  return out;
}

std::string settling_csv(const std::vector<transient::SettlingResult>& results) {
  std::string out = "n,corner,settling_s,final_v\n";
  for (const auto& r : results) {
    out += std::to_string(r.n_cells) + "," + transient::corner_name(r.corner) + "," +
           textio::sci(r.settling_s) + "," + textio::sci(r.final_v) + "\n";
  }
  return out;
}

namespace {

struct Panel {
  double x0, y0, x1, y1;  // pixel box of the plot area
  double xmin, xmax, ymin, ymax;

  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); }
  double py(double y) const { return y1 - (y - ymin) / (ymax - ymin) * (y1 - y0); }
};

std::string pxf(double v) { return textio::fixed(v, 2); }

void panel_frame(std::string& out, const Panel& p, const std::string& title,
                 const std::string& x_label, const std::string& y_label) {
  out += "<rect x=\"" + pxf(p.x0) + "\" y=\"" + pxf(p.y0) + "\" width=\"" + pxf(p.x1 - p.x0) +
         "\" height=\"" + pxf(p.y1 - p.y0) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
  out += "<text x=\"" + pxf((p.x0 + p.x1) / 2) + "\" y=\"" + pxf(p.y0 - 14) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"15\">" + title +
         "</text>\n";
  out += "<text x=\"" + pxf((p.x0 + p.x1) / 2) + "\" y=\"" + pxf(p.y1 + 36) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">" + x_label +
         "</text>\n";
  out += "<text x=\"" + pxf(p.x0 - 64) + "\" y=\"" + pxf((p.y0 + p.y1) / 2) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 " +
         pxf(p.x0 - 64) + " " + pxf((p.y0 + p.y1) / 2) + ")\">" + y_label + "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    double fy = p.ymin + (p.ymax - p.ymin) * i / 4.0;
    double y = p.py(fy);
    out += "<line x1=\"" + pxf(p.x0 - 4) + "\" y1=\"" + pxf(y) + "\" x2=\"" + pxf(p.x0) +
           "\" y2=\"" + pxf(y) + "\" stroke=\"#000000\"/>\n";
    out += "<text x=\"" + pxf(p.x0 - 8) + "\" y=\"" + pxf(y + 4) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"10\">" + textio::sci(fy) +
           "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    double fx = p.xmin + (p.xmax - p.xmin) * i / 4.0;
    double x = p.px(fx);
    out += "<line x1=\"" + pxf(x) + "\" y1=\"" + pxf(p.y1) + "\" x2=\"" + pxf(x) + "\" y2=\"" +
           pxf(p.y1 + 4) + "\" stroke=\"#000000\"/>\n";
    out += "<text x=\"" + pxf(x) + "\" y=\"" + pxf(p.y1 + 18) +
           "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"10\">" +
           textio::fixed(fx, 0) + "</text>\n";
  }
}

void polyline(std::string& out, const Panel& p, const std::vector<std::pair<double, double>>& pts,
              const char* color, bool dashed, bool markers) {
  if (pts.empty()) return;
  out += "<polyline fill=\"none\" stroke=\"";
  out += color;
  out += "\" stroke-width=\"1.5\"";
  if (dashed) out += " stroke-dasharray=\"6 4\"";
  out += " points=\"";
  for (const auto& [x, y] : pts) out += pxf(p.px(x)) + "," + pxf(p.py(y)) + " ";
  out += "\"/>\n";
  if (markers) {
    for (const auto& [x, y] : pts) {
      out += "<circle cx=\"" + pxf(p.px(x)) + "\" cy=\"" + pxf(p.py(y)) +
             "\" r=\"3.5\" fill=\"" + std::string(color) + "\"/>\n";
    }
  }
}

void series_label(std::string& out, const Panel& p, int slot, const char* color,
                  const std::string& text) {
  double x = p.x0 + 12;
  double y = p.y0 + 16 + 16 * slot;
  out += "<rect x=\"" + pxf(x) + "\" y=\"" + pxf(y - 9) +
         "\" width=\"10\" height=\"10\" fill=\"" + std::string(color) + "\"/>\n";
  out += "<text x=\"" + pxf(x + 16) + "\" y=\"" + pxf(y) +
         "\" font-family=\"monospace\" font-size=\"11\">" + text + "</text>\n";
}

}  // namespace

std::string plots_svg(const SweepTable& table, const std::vector<transient::SettlingResult>& results,
                      const ExpFit& fit) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1200 520\" width=\"1200\" "
         "height=\"520\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"1200\" height=\"520\" fill=\"#ffffff\"/>\n";

  // Left: line capacitance versus cells per line.
  {
    double xmax = 1, ymax = 0;
    for (const auto& r : table) {
      if (r.metric != "capacitance_total") continue;
      xmax = std::max(xmax, double(r.n_cells));
      ymax = std::max(ymax, r.value);
    }
    Panel p{100, 60, 560, 440, 0, xmax * 1.05, 0, ymax > 0 ? ymax * 1.1 : 1};
    panel_frame(out, p, "line capacitance", "cells per line", "capacitance (F)");
    const char* colors[3] = {"#1f77b4", "#2ca02c", "#d62728"};
    int slot = 0;
    for (LineKind k : {LineKind::SEL, LineKind::N, LineKind::P}) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& r : table)
        if (r.metric == "capacitance_total" && r.line == line_kind_name(k))
          pts.emplace_back(double(r.n_cells), r.value);
      polyline(out, p, pts, colors[slot], false, true);
      series_label(out, p, slot, colors[slot], line_kind_name(k));
      ++slot;
    }
  }

  // Right: settling time versus cells per line, with the exponential fit.
  {
    double xmax = 1, ymax = 0;
    for (const auto& r : results) {
      xmax = std::max(xmax, double(r.n_cells));
      ymax = std::max(ymax, r.settling_s);
    }
    Panel p{700, 60, 1160, 440, 0, xmax * 1.05, 0, ymax > 0 ? ymax * 1.1 : 1};
    panel_frame(out, p, "read settling time", "cells per line", "settling time (s)");
    const char* colors[3] = {"#d62728", "#ff7f0e", "#2ca02c"};
    const transient::Corner corners[3] = {transient::Corner::SS, transient::Corner::TT,
                                          transient::Corner::FF};
    for (int c = 0; c < 3; ++c) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& r : results)
        if (r.corner == corners[c]) pts.emplace_back(double(r.n_cells), r.settling_s);
      std::sort(pts.begin(), pts.end());
      polyline(out, p, pts, colors[c], false, true);
      series_label(out, p, c, colors[c], transient::corner_name(corners[c]));
    }
    if (fit.a > 0) {
      std::vector<std::pair<double, double>> pts;
      for (int i = 0; i <= 64; ++i) {
        double x = p.xmin + (p.xmax - p.xmin) * i / 64.0;
        pts.emplace_back(x, fit.a * std::exp(fit.k * x));
      }
      polyline(out, p, pts, "#000000", true, false);
      series_label(out, p, 3, "#000000", "fit a*exp(k*n)");
    }
  }

  out += "</svg>\n";
  return out;
}

CharacterizationReport characterize(const std::vector<std::uint32_t>& sizes,
                                    const parasitics::ParasiticRates& rates,
                                    const transient::CalibrationSpec& spec,
                                    const transient::TestbenchOptions& opts) {
  CharacterizationReport rep;
  rep.sizes = sizes;
  rep.sweep = sweep_parasitics(sizes, rates);
  rep.fits = fit_sweep(rep.sweep);
  transient::SettlingStudy study = transient::run_settling_study(sizes, rates, spec, opts);
  rep.r_switch_ss = study.r_switch_ss;
  rep.settling = study.results;
  std::vector<std::pair<double, double>> ss_pts;
  for (const auto& r : rep.settling)
    if (r.corner == transient::Corner::SS) ss_pts.emplace_back(double(r.n_cells), r.settling_s);
  rep.settling_fit = fit_exponential(ss_pts);
  return rep;
}

std::vector<std::string> emit_report(const CharacterizationReport& rep, const std::string& dir) {
  fileio::ensure_dir(dir);
  std::vector<std::string> paths;
  paths.push_back(dir + "/parasitics.csv");
  fileio::write_text(paths.back(), parasitics_csv(rep.sweep, rep.fits));
  paths.push_back(dir + "/settling.csv");
  fileio::write_text(paths.back(), settling_csv(rep.settling));
  paths.push_back(dir + "/plots.svg");
  fileio::write_text(paths.back(), plots_svg(rep.sweep, rep.settling, rep.settling_fit));
  return paths;
}

Csv parse_csv(std::string_view text) {
  Csv csv;
  bool first = true;
  for (std::string_view line : textio::split(text, '\n')) {
    if (textio::trim(line).empty()) continue;
    std::vector<std::string> fields;
    for (std::string_view f : textio::split(line, ',')) fields.emplace_back(textio::trim(f));
    if (first) {
      csv.header = std::move(fields);
      first = false;
    } else {
      csv.rows.push_back(std::move(fields));
    }
  }
  return csv;
}

}  // namespace rramc::report
