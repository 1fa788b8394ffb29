#include "rramc/parasitics.hpp"

#include "rramc/errors.hpp"
#include "rramc/textio.hpp"

namespace rramc::parasitics {

void ParasiticRates::validate() const {
  if (!(c_sel_f_per_cell > 0) || !(c_n_f_per_cell > 0) || !(c_p_f_per_cell > 0))
    throw InvalidParam("capacitance rates must be positive");
  if (!(r_sel_ohm_per_cell > 0) || !(r_n_ohm_per_cell > 0) || !(r_p_ohm_per_cell > 0))
    throw InvalidParam("resistance rates must be positive");
  if (!(c_sel_f_per_cell > c_n_f_per_cell) || !(c_n_f_per_cell > c_p_f_per_cell))
    throw InvalidParam("capacitance rates must order SEL > N > P");
  if (r_n_ohm_per_cell != r_p_ohm_per_cell)
    throw InvalidParam("N and P lines run on the same metal and must share a resistance rate");
  if (gate_c_f_per_cell < 0) throw InvalidParam("gate_c_f_per_cell must be non-negative");
  if (!(c_periph_f >= 0)) throw InvalidParam("c_periph_f must be non-negative");
}

double cap_rate(const ParasiticRates& rates, LineKind k) {
  switch (k) {
    case LineKind::SEL: return rates.c_sel_f_per_cell + rates.gate_c_f_per_cell;
    case LineKind::N: return rates.c_n_f_per_cell;
    case LineKind::P: return rates.c_p_f_per_cell;
  }
  throw InvalidParam("bad line kind");
}

double res_rate(const ParasiticRates& rates, LineKind k) {
  switch (k) {
    case LineKind::SEL: return rates.r_sel_ohm_per_cell;
    case LineKind::N: return rates.r_n_ohm_per_cell;
    case LineKind::P: return rates.r_p_ohm_per_cell;
  }
  throw InvalidParam("bad line kind");
}

double line_capacitance(const ParasiticRates& rates, LineKind k, std::uint32_t n_cells) {
  return cap_rate(rates, k) * double(n_cells);
}

double line_resistance(const ParasiticRates& rates, LineKind k, std::uint32_t n_cells) {
  return res_rate(rates, k) * double(n_cells);
}

std::vector<LadderSegment> ladder(const ParasiticRates& rates, LineKind k, std::uint32_t n_cells) {
  if (n_cells == 0) throw InvalidParam("ladder needs at least one cell");
  return std::vector<LadderSegment>(n_cells, LadderSegment{res_rate(rates, k), cap_rate(rates, k)});
}

double elmore_delay(const std::vector<LadderSegment>& segments) {
  // Suffix capacitance seen through each series resistor, accumulated from
  // the far end so each segment is visited once.
  double suffix_c = 0.0;
  double delay = 0.0;
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
    suffix_c += it->farads;
    delay += it->ohms * suffix_c;
  }
  return delay;
}

double elmore_delay_uniform(double segment_ohms, double segment_farads, std::uint32_t n_cells) {
  double n = double(n_cells);
  return segment_ohms * segment_farads * n * (n + 1.0) / 2.0;
}

ParasiticRates rates_from_doc(const keyval::Document& doc) {
  ParasiticRates r;
  r.c_sel_f_per_cell = doc.get_double("c_sel_f_per_cell", r.c_sel_f_per_cell);
  r.c_n_f_per_cell = doc.get_double("c_n_f_per_cell", r.c_n_f_per_cell);
  r.c_p_f_per_cell = doc.get_double("c_p_f_per_cell", r.c_p_f_per_cell);
  r.r_sel_ohm_per_cell = doc.get_double("r_sel_ohm_per_cell", r.r_sel_ohm_per_cell);
  r.r_n_ohm_per_cell = doc.get_double("r_n_ohm_per_cell", r.r_n_ohm_per_cell);
  r.r_p_ohm_per_cell = doc.get_double("r_p_ohm_per_cell", r.r_p_ohm_per_cell);
  r.gate_c_f_per_cell = doc.get_double("gate_c_f_per_cell", r.gate_c_f_per_cell);
  r.c_periph_f = doc.get_double("c_periph_f", r.c_periph_f);
  r.validate();
  return r;
}

ParasiticRates load_rates(const std::string& path) {
  return rates_from_doc(keyval::load_file(path));
}

std::string serialize(const ParasiticRates& r) {
  keyval::Document doc;
  doc.set("c_sel_f_per_cell", textio::full(r.c_sel_f_per_cell));
  doc.set("c_n_f_per_cell", textio::full(r.c_n_f_per_cell));
  doc.set("c_p_f_per_cell", textio::full(r.c_p_f_per_cell));
  doc.set("r_sel_ohm_per_cell", textio::full(r.r_sel_ohm_per_cell));
  doc.set("r_n_ohm_per_cell", textio::full(r.r_n_ohm_per_cell));
  doc.set("r_p_ohm_per_cell", textio::full(r.r_p_ohm_per_cell));
  doc.set("gate_c_f_per_cell", textio::full(r.gate_c_f_per_cell));
  doc.set("c_periph_f", textio::full(r.c_periph_f));
  return doc.serialize();
}

}  // namespace rramc::parasitics
