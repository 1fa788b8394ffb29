#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rramc/parasitics.hpp"
#include "rramc/transient.hpp"

namespace rramc::report {

struct SweepRow {
  std::uint32_t n_cells = 0;
  std::string line;
  std::string metric;
  double value = 0.0;
  std::string unit;
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

using SweepTable = std::vector<SweepRow>;

// Per size and line family: total capacitance and resistance rows.
SweepTable sweep_parasitics(const std::vector<std::uint32_t>& sizes,
                            const parasitics::ParasiticRates& rates);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares followed by iterative residual refinement, so data
// that is exactly linear in doubles recovers the exact slope and a zero
// intercept. Needs two distinct abscissae.
LinearFit linear_fit(const std::vector<std::pair<double, double>>& pts);  // throws DegenerateFit

struct ExpFit {
  double a = 0.0;  // y = a * exp(k * x)
  double k = 0.0;
  double r_squared = 0.0;
};

// Log-linear fit; every ordinate must be positive.
ExpFit fit_exponential(const std::vector<std::pair<double, double>>& pts);  // throws DegenerateFit

struct LineFits {
  LinearFit capacitance;
  LinearFit resistance;
};

// Fits per line family, indexed by LineKind.
std::array<LineFits, 3> fit_sweep(const SweepTable& table);

std::string parasitics_csv(const SweepTable& table, const std::array<LineFits, 3>& fits);
std::string settling_csv(const std::vector<transient::SettlingResult>& results);
std::string plots_svg(const SweepTable& table, const std::vector<transient::SettlingResult>& results,
                      const ExpFit& fit);

struct CharacterizationReport {
  std::vector<std::uint32_t> sizes;
  SweepTable sweep;
  std::array<LineFits, 3> fits;
  double r_switch_ss = 0.0;
  std::vector<transient::SettlingResult> settling;
  ExpFit settling_fit;  // slow-corner settling time versus cells per line
};

// Full characterization: parasitic sweep and fits, calibration, the settling
// study over all corners, and the exponential growth fit.
CharacterizationReport characterize(const std::vector<std::uint32_t>& sizes,
                                    const parasitics::ParasiticRates& rates,
                                    const transient::CalibrationSpec& spec = {},
                                    const transient::TestbenchOptions& opts = {});

// Writes parasitics.csv, settling.csv, and plots.svg into dir; returns the
// paths in that order.
std::vector<std::string> emit_report(const CharacterizationReport& rep, const std::string& dir);

// Minimal CSV splitter for re-reading emitted tables (no quoting).
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
Csv parse_csv(std::string_view text);

}  // namespace rramc::report
