#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rramc/parasitics.hpp"

namespace rramc::transient {

// Piecewise-linear waveform. Clamps to the first/last value outside the
// breakpoint range.
struct PwlWaveform {
  std::vector<std::pair<double, double>> points;  // (time, volts), strictly increasing time

  double at(double t) const;
  void validate() const;  // throws InvalidParam
  static PwlWaveform constant(double v);
  // 0 V before t=0, linear ramp to v over the (tiny) rise time.
  static PwlWaveform step(double v, double rise_s = 1e-15);
};

// Linear RC network with ideal grounded voltage sources. Node 0 is ground.
class RcNetwork {
public:
  struct Res { std::uint32_t a, b; double ohms; };
  struct Cap { std::uint32_t a, b; double farads; };
  struct Src { std::uint32_t node; PwlWaveform wave; };

  RcNetwork();

  std::uint32_t add_node(const std::string& name);
  std::uint32_t node(std::string_view name) const;  // throws InvalidParam
  static constexpr std::uint32_t ground() { return 0; }
  std::size_t node_count() const { return names_.size(); }
  const std::string& node_name(std::uint32_t id) const { return names_[id]; }

  void add_resistor(std::uint32_t a, std::uint32_t b, double ohms);
  void add_capacitor(std::uint32_t a, std::uint32_t b, double farads);
  void add_vsource(std::uint32_t node, PwlWaveform wave);

  const std::vector<Res>& resistors() const { return res_; }
  const std::vector<Cap>& capacitors() const { return caps_; }
  const std::vector<Src>& sources() const { return srcs_; }

  // Every node must reach ground or a source through resistors, or the DC
  // operating point is undefined.
  void check_connected() const;  // throws SingularNetwork / EmptyNetwork

private:
  std::vector<std::string> names_;
  std::vector<Res> res_;
  std::vector<Cap> caps_;
  std::vector<Src> srcs_;
};

// Node voltages with capacitors open, sources evaluated at the given time.
std::vector<double> dc_solve(const RcNetwork& net, double at_time);

struct TransientResult {
  double dt = 0.0;
  std::vector<double> times;            // times[k] = k * dt, including 0
  std::vector<std::vector<double>> v;   // v[node][k]

  std::vector<double> probe(std::uint32_t hi, std::uint32_t lo) const;  // v[hi]-v[lo]
};

// Trapezoidal integration of the MNA system M x' + K x = u(t) with a single
// implicit-Euler start step; both factorizations are reused across steps.
TransientResult solve_transient(const RcNetwork& net, double t_stop, double dt);

// Earliest sample time T such that every sample at or after T lies within
// band_fraction * |final_value| of final_value. Returns times.front() when
// the whole record qualifies; throws NotSettled when the last sample does not.
double settling_time(const std::vector<double>& times, const std::vector<double>& values,
                     double final_value, double band_fraction = 0.01);

enum class Corner : std::uint8_t { SS, TT, FF };
const char* corner_name(Corner c);

struct CornerModel {
  Corner corner{Corner::SS};
  double switch_ohms = 0.0;  // on-resistance of one access/mux switch
};

// TT and FF scale the slow-corner switch resistance by 0.7 and 0.5.
std::array<CornerModel, 3> make_corners(double r_switch_ss);

struct TestbenchOptions {
  double r_mem_ohms = 5.0e6;
  double vdd = 1.8;
  double band_fraction = 0.01;
};

// Worst-case read path for a line of n cells: a stepped driver reaches the N
// line through one mux switch loaded by the peripheral capacitance, the N
// and P lines are n-segment RC ladders, and the far-end cell (access switch
// in series with the memristor) returns to the grounded P line. The probe is
// the voltage across the memristor.
struct ReadTestbench {
  RcNetwork net;
  std::uint32_t probe_hi = 0;  // cell internal node
  std::uint32_t probe_lo = 0;  // P-line tap at the cell
  double elmore_hint_s = 0.0;  // first-moment estimate of the charge path
};

ReadTestbench build_read_testbench(std::uint32_t n_cells, const parasitics::ParasiticRates& rates,
                                   const CornerModel& corner, const TestbenchOptions& opts = {});

struct SettlingResult {
  std::uint32_t n_cells = 0;
  Corner corner{Corner::SS};
  double settling_s = 0.0;
  double final_v = 0.0;
  double dt_s = 0.0;
  double t_stop_s = 0.0;
};

// Runs the testbench with dt = elmore/400 and an adaptive stop time
// (20x elmore, doubled until settled, capped at 1 us).
SettlingResult measure_settling(std::uint32_t n_cells, const parasitics::ParasiticRates& rates,
                                const CornerModel& corner, const TestbenchOptions& opts = {});

struct CalibrationSpec {
  double target_s = 550e-12;
  std::uint32_t n_ref = 8;
  double rel_tolerance = 0.002;
  double r_lo = 1.0;
  double r_hi = 1.0e7;
};

// Bisects the slow-corner switch resistance until the n_ref testbench
// settles at the target time.
double calibrate_switch_resistance(const parasitics::ParasiticRates& rates,
                                   const CalibrationSpec& spec = {},
                                   const TestbenchOptions& opts = {});

struct SettlingStudy {
  double r_switch_ss = 0.0;
  std::vector<SettlingResult> results;  // per size, SS then TT then FF
};

SettlingStudy run_settling_study(const std::vector<std::uint32_t>& sizes,
                                 const parasitics::ParasiticRates& rates,
                                 const CalibrationSpec& spec = {},
                                 const TestbenchOptions& opts = {});

}  // namespace rramc::transient
