#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rramc/keyval.hpp"
#include "rramc/lines.hpp"

namespace rramc::parasitics {

// Per-cell parasitic rates of the three line families plus fixed peripheral
// loading. Line capacitance and resistance both grow linearly with the cell
// count; a line crossing n cells is modeled as n identical RC segments.
struct ParasiticRates {
  double c_sel_f_per_cell = 5.83e-15;
  double c_n_f_per_cell = 3.31e-15;
  double c_p_f_per_cell = 2.48e-15;
  double r_sel_ohm_per_cell = 1.28;
  double r_n_ohm_per_cell = 0.14;
  double r_p_ohm_per_cell = 0.14;
  // Extra gate load each cell adds to its SEL segment.
  double gate_c_f_per_cell = 0.0;
  // Lumped load of the column mux and driver wiring at a driven line input.
  double c_periph_f = 5.78e-13;

  void validate() const;  // throws InvalidParam
  static ParasiticRates defaults() { return {}; }
  friend bool operator==(const ParasiticRates&, const ParasiticRates&) = default;
};

double cap_rate(const ParasiticRates& rates, LineKind k);
double res_rate(const ParasiticRates& rates, LineKind k);

// Totals for a line crossing n cells.
double line_capacitance(const ParasiticRates& rates, LineKind k, std::uint32_t n_cells);
double line_resistance(const ParasiticRates& rates, LineKind k, std::uint32_t n_cells);

struct LadderSegment {
  double ohms;
  double farads;
};

// Distributed model: n identical series segments, capacitor to ground at the
// far node of each segment. Segment 0 is nearest the driver.
std::vector<LadderSegment> ladder(const ParasiticRates& rates, LineKind k, std::uint32_t n_cells);

// First-moment delay of an RC ladder driven at segment 0:
// sum_i r_i * (sum of capacitance at and beyond node i).
double elmore_delay(const std::vector<LadderSegment>& segments);

// Closed form for n identical segments: r * c * n * (n + 1) / 2.
double elmore_delay_uniform(double segment_ohms, double segment_farads, std::uint32_t n_cells);

// Key-value serialization; keys match the struct field names.
ParasiticRates rates_from_doc(const keyval::Document& doc);  // defaults + overrides
ParasiticRates load_rates(const std::string& path);
std::string serialize(const ParasiticRates& rates);

}  // namespace rramc::parasitics
