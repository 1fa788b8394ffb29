#include "rramc/transient.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rramc/errors.hpp"

namespace rramc::transient {

double PwlWaveform::at(double t) const {
  validate();
  if (t <= points.front().first) return points.front().second;
  if (t >= points.back().first) return points.back().second;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (t <= points[i].first) {
      auto [t0, v0] = points[i - 1];
      auto [t1, v1] = points[i];
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return points.back().second;
}

void PwlWaveform::validate() const {
  if (points.empty()) throw InvalidParam("waveform needs at least one point");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
      throw InvalidParam("waveform point is not finite");
    if (i > 0 && !(points[i].first > points[i - 1].first))
      throw InvalidParam("waveform times must be strictly increasing");
  }
}

PwlWaveform PwlWaveform::constant(double v) { return {{{0.0, v}}}; }

PwlWaveform PwlWaveform::step(double v, double rise_s) {
  if (!(rise_s > 0)) throw InvalidParam("step rise time must be positive");
  return {{{0.0, 0.0}, {rise_s, v}}};
}

RcNetwork::RcNetwork() { names_.push_back("0"); }

std::uint32_t RcNetwork::add_node(const std::string& name) {
  if (name.empty()) throw InvalidParam("node name must be non-empty");
  for (const auto& n : names_)
    if (n == name) throw InvalidParam("duplicate node name '" + name + "'");
  names_.push_back(name);
  return static_cast<std::uint32_t>(names_.size() - 1);
}

std::uint32_t RcNetwork::node(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<std::uint32_t>(i);
  throw InvalidParam("no node named '" + std::string(name) + "'");
}

void RcNetwork::add_resistor(std::uint32_t a, std::uint32_t b, double ohms) {
  if (a >= names_.size() || b >= names_.size()) throw InvalidParam("resistor node out of range");
  if (a == b) throw InvalidParam("resistor terminals coincide");
  if (!(ohms > 0) || !std::isfinite(ohms)) throw InvalidParam("resistance must be positive");
  res_.push_back({a, b, ohms});
}

void RcNetwork::add_capacitor(std::uint32_t a, std::uint32_t b, double farads) {
  if (a >= names_.size() || b >= names_.size()) throw InvalidParam("capacitor node out of range");
  if (a == b) throw InvalidParam("capacitor terminals coincide");
  if (!(farads > 0) || !std::isfinite(farads)) throw InvalidParam("capacitance must be positive");
  caps_.push_back({a, b, farads});
}

void RcNetwork::add_vsource(std::uint32_t node, PwlWaveform wave) {
  if (node == ground()) throw InvalidParam("voltage source cannot drive ground");
  if (node >= names_.size()) throw InvalidParam("source node out of range");
  wave.validate();
  for (const auto& s : srcs_)
    if (s.node == node) throw InvalidParam("node '" + names_[node] + "' already has a source");
  srcs_.push_back({node, std::move(wave)});
}

void RcNetwork::check_connected() const {
  if (res_.empty() && caps_.empty() && srcs_.empty())
    throw EmptyNetwork("network has no elements");
  std::vector<std::uint32_t> parent(names_.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& r : res_) {
    std::uint32_t a = find(r.a), b = find(r.b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<bool> anchored(names_.size(), false);
  anchored[find(ground())] = true;
  for (const auto& s : srcs_) anchored[find(s.node)] = true;
  for (std::uint32_t i = 0; i < names_.size(); ++i) {
    if (!anchored[find(i)])
      throw SingularNetwork("node '" + names_[i] + "' has no resistive path to ground or a source");
  }
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

// Unknown ordering: non-ground node voltages, then source branch currents.
struct Assembled {
  const RcNetwork* net = nullptr;
  std::size_t n_nodes = 0;  // excluding ground
  std::size_t n_src = 0;
  SpMat K;  // conductances and source incidence
  SpMat M;  // capacitances

  std::size_t dim() const { return n_nodes + n_src; }

  Eigen::VectorXd u(double t) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Eigen::Index(dim()));
    const auto& srcs = net->sources();
    for (std::size_t s = 0; s < srcs.size(); ++s)
      rhs[Eigen::Index(n_nodes + s)] = srcs[s].wave.at(t);
    return rhs;
  }
};

void stamp_pair(Triplets& t, std::uint32_t a, std::uint32_t b, double val) {
  // Node 0 is ground and has no equation.
  if (a != 0) t.emplace_back(int(a - 1), int(a - 1), val);
  if (b != 0) t.emplace_back(int(b - 1), int(b - 1), val);
  if (a != 0 && b != 0) {
    t.emplace_back(int(a - 1), int(b - 1), -val);
    t.emplace_back(int(b - 1), int(a - 1), -val);
  }
}

Assembled assemble(const RcNetwork& net) {
  net.check_connected();
  Assembled a;
  a.net = &net;
  a.n_nodes = net.node_count() - 1;
  a.n_src = net.sources().size();

  Triplets kt, mt;
  for (const auto& r : net.resistors()) stamp_pair(kt, r.a, r.b, 1.0 / r.ohms);
  for (const auto& c : net.capacitors()) stamp_pair(mt, c.a, c.b, c.farads);
  for (std::size_t s = 0; s < a.n_src; ++s) {
    std::uint32_t n = net.sources()[s].node;
    kt.emplace_back(int(n - 1), int(a.n_nodes + s), 1.0);
    kt.emplace_back(int(a.n_nodes + s), int(n - 1), 1.0);
  }
  a.K.resize(Eigen::Index(a.dim()), Eigen::Index(a.dim()));
  a.K.setFromTriplets(kt.begin(), kt.end());
  a.M.resize(Eigen::Index(a.dim()), Eigen::Index(a.dim()));
  a.M.setFromTriplets(mt.begin(), mt.end());
  return a;
}

Eigen::VectorXd solve_dc(const Assembled& a, double t) {
  Eigen::SparseLU<SpMat> lu;
  lu.compute(a.K);
  if (lu.info() != Eigen::Success)
    throw SingularNetwork("DC system matrix is singular");
  Eigen::VectorXd x = lu.solve(a.u(t));
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw SingularNetwork("DC solve failed");
  return x;
}

// Shared stepping loop; sink(k, t, x) receives every accepted state,
// including the initial one at k == 0.
template <typename Sink>
void run_transient(const Assembled& a, double t_stop, double dt, Sink&& sink) {
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidParam("dt must be positive");
  if (!(t_stop > 0) || !std::isfinite(t_stop)) throw InvalidParam("t_stop must be positive");
  if (!(dt <= t_stop)) throw InvalidParam("dt must not exceed t_stop");
  auto steps = static_cast<std::size_t>(std::ceil(t_stop / dt - 1e-9));
  if (steps > 20'000'000) throw InvalidParam("step count exceeds the 2e7 limit");

  SpMat m_over_h = a.M / dt;
  SpMat a_be = m_over_h + a.K;
  SpMat a_tr = 2.0 * m_over_h + a.K;
  SpMat b_tr = 2.0 * m_over_h - a.K;

  Eigen::SparseLU<SpMat> lu_be, lu_tr;
  lu_be.compute(a_be);
  if (lu_be.info() != Eigen::Success) throw SingularNetwork("start-step matrix is singular");
  lu_tr.compute(a_tr);
  if (lu_tr.info() != Eigen::Success) throw SingularNetwork("trapezoidal matrix is singular");

  Eigen::VectorXd x = solve_dc(a, 0.0);
  Eigen::VectorXd u_prev = a.u(0.0);
  sink(std::size_t(0), 0.0, x);

  for (std::size_t k = 1; k <= steps; ++k) {
    double t = dt * double(k);
    Eigen::VectorXd u_now = a.u(t);
    if (k == 1) {
      x = lu_be.solve(m_over_h * x + u_now);
    } else {
      x = lu_tr.solve(b_tr * x + u_now + u_prev);
    }
    u_prev = std::move(u_now);
    sink(k, t, x);
  }
}

}  // namespace

std::vector<double> dc_solve(const RcNetwork& net, double at_time) {
  Assembled a = assemble(net);
  Eigen::VectorXd x = solve_dc(a, at_time);
  std::vector<double> v(net.node_count(), 0.0);
  for (std::size_t i = 1; i < net.node_count(); ++i) v[i] = x[Eigen::Index(i - 1)];
  return v;
}

std::vector<double> TransientResult::probe(std::uint32_t hi, std::uint32_t lo) const {
  if (hi >= v.size() || lo >= v.size()) throw InvalidParam("probe node out of range");
  std::vector<double> d(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) d[k] = v[hi][k] - v[lo][k];
  return d;
}

TransientResult solve_transient(const RcNetwork& net, double t_stop, double dt) {
  Assembled a = assemble(net);
  TransientResult res;
  res.dt = dt;
  auto n_all = net.node_count();
  res.v.assign(n_all, {});
  run_transient(a, t_stop, dt, [&](std::size_t, double t, const Eigen::VectorXd& x) {
    res.times.push_back(t);
    res.v[0].push_back(0.0);
    for (std::size_t i = 1; i < n_all; ++i) res.v[i].push_back(x[Eigen::Index(i - 1)]);
  });
  for (std::size_t i = 0; i < n_all; ++i)
    for (double val : res.v[i])
      if (!std::isfinite(val)) throw NonFiniteValue("non-finite node voltage in transient result");
  return res;
}

double settling_time(const std::vector<double>& times, const std::vector<double>& values,
                     double final_value, double band_fraction) {
  if (times.size() != values.size() || times.empty())
    throw InvalidParam("settling needs equal-length, non-empty samples");
  if (!std::isfinite(final_value)) throw NonFiniteValue("final value is not finite");
  double band = band_fraction * std::abs(final_value);
  if (!(band > 0)) throw InvalidParam("settling band is empty");

  std::size_t last_outside = SIZE_MAX;
  for (std::size_t i = times.size(); i-- > 0;) {
    if (std::abs(values[i] - final_value) > band) {
      last_outside = i;
      break;
    }
  }
  if (last_outside == SIZE_MAX) return times.front();
  if (last_outside + 1 >= times.size())
    throw NotSettled("waveform is outside the band at the final sample");
  return times[last_outside + 1];
}

const char* corner_name(Corner c) {
  switch (c) {
    case Corner::SS: return "SS";
    case Corner::TT: return "TT";
    case Corner::FF: return "FF";
  }
  return "?";
}

std::array<CornerModel, 3> make_corners(double r_switch_ss) {
  if (!(r_switch_ss > 0)) throw InvalidParam("switch resistance must be positive");
  return {{{Corner::SS, r_switch_ss}, {Corner::TT, 0.7 * r_switch_ss}, {Corner::FF, 0.5 * r_switch_ss}}};
}

namespace {

void validate_bench_options(const TestbenchOptions& o) {
  if (!(o.r_mem_ohms > 0)) throw InvalidParam("r_mem_ohms must be positive");
  if (!(o.vdd > 0)) throw InvalidParam("vdd must be positive");
  if (!(o.band_fraction > 0) || !(o.band_fraction < 0.5))
    throw InvalidParam("band_fraction must be in (0, 0.5)");
}

}  // namespace

ReadTestbench build_read_testbench(std::uint32_t n_cells, const parasitics::ParasiticRates& rates,
                                   const CornerModel& corner, const TestbenchOptions& opts) {
  rates.validate();
  validate_bench_options(opts);
  if (n_cells == 0) throw InvalidParam("testbench needs at least one cell");
  if (!(corner.switch_ohms > 0)) throw InvalidParam("switch resistance must be positive");

  double r_n = parasitics::res_rate(rates, LineKind::N);
  double c_n = parasitics::cap_rate(rates, LineKind::N);
  double r_p = parasitics::res_rate(rates, LineKind::P);
  double c_p = parasitics::cap_rate(rates, LineKind::P);

  ReadTestbench tb;
  RcNetwork& net = tb.net;
  std::uint32_t drv = net.add_node("drv");
  std::uint32_t nin = net.add_node("nin");
  net.add_vsource(drv, PwlWaveform::step(opts.vdd));
  net.add_resistor(drv, nin, corner.switch_ohms);
  if (rates.c_periph_f > 0) net.add_capacitor(nin, RcNetwork::ground(), rates.c_periph_f);

  int pad = textio::index_width(n_cells + 1);
  std::uint32_t prev = nin;
  std::uint32_t n_far = nin;
  for (std::uint32_t i = 1; i <= n_cells; ++i) {
    std::uint32_t node = net.add_node("n_" + textio::pad(i, pad));
    net.add_resistor(prev, node, r_n);
    net.add_capacitor(node, RcNetwork::ground(), c_n);
    prev = node;
    n_far = node;
  }

  std::uint32_t pin = net.add_node("pin");
  net.add_vsource(pin, PwlWaveform::constant(0.0));
  prev = pin;
  std::uint32_t p_far = pin;
  for (std::uint32_t i = 1; i <= n_cells; ++i) {
    std::uint32_t node = net.add_node("p_" + textio::pad(i, pad));
    net.add_resistor(prev, node, r_p);
    net.add_capacitor(node, RcNetwork::ground(), c_p);
    prev = node;
    p_far = node;
  }

  std::uint32_t mid = net.add_node("mid");
  net.add_resistor(mid, n_far, corner.switch_ohms);       // far cell access switch
  net.add_resistor(p_far, mid, opts.r_mem_ohms);          // far cell memristor

  tb.probe_hi = mid;
  tb.probe_lo = p_far;

  double n = double(n_cells);
  tb.elmore_hint_s = corner.switch_ohms * (rates.c_periph_f + n * c_n) +
                     parasitics::elmore_delay_uniform(r_n, c_n, n_cells) +
                     parasitics::elmore_delay_uniform(r_p, c_p, n_cells);
  return tb;
}

SettlingResult measure_settling(std::uint32_t n_cells, const parasitics::ParasiticRates& rates,
                                const CornerModel& corner, const TestbenchOptions& opts) {
  ReadTestbench tb = build_read_testbench(n_cells, rates, corner, opts);
  Assembled a = assemble(tb.net);

  std::vector<double> dc = dc_solve(tb.net, 1.0);
  double final_v = dc[tb.probe_hi] - dc[tb.probe_lo];

  double dt = tb.elmore_hint_s / 400.0;
  double t_stop = 20.0 * tb.elmore_hint_s;
  constexpr double kMaxStop = 1e-6;
  if (t_stop > kMaxStop) t_stop = kMaxStop;
  // Capping t_stop must not leave dt above it; keep at least 400 samples in
  // the window so a hopeless bench reports NotSettled instead of a dt error.
  dt = std::min(dt, t_stop / 400.0);

  Eigen::Index hi = Eigen::Index(tb.probe_hi - 1);
  Eigen::Index lo = Eigen::Index(tb.probe_lo - 1);
  for (;;) {
    std::vector<double> times, probe;
    run_transient(a, t_stop, dt, [&](std::size_t, double t, const Eigen::VectorXd& x) {
      double v = x[hi] - x[lo];
      if (!std::isfinite(v)) throw NonFiniteValue("non-finite probe voltage");
      times.push_back(t);
      probe.push_back(v);
    });
    try {
      SettlingResult res;
      res.n_cells = n_cells;
      res.corner = corner.corner;
      res.settling_s = settling_time(times, probe, final_v, opts.band_fraction);
      res.final_v = final_v;
      res.dt_s = dt;
      res.t_stop_s = t_stop;
      return res;
    } catch (const NotSettled&) {
      if (t_stop >= kMaxStop) throw;
      t_stop = std::min(2.0 * t_stop, kMaxStop);
    }
  }
}

double calibrate_switch_resistance(const parasitics::ParasiticRates& rates,
                                   const CalibrationSpec& spec, const TestbenchOptions& opts) {
  if (!(spec.target_s > 0)) throw InvalidParam("calibration target must be positive");
  if (!(spec.r_lo > 0) || !(spec.r_hi > spec.r_lo))
    throw InvalidParam("calibration bracket must satisfy 0 < r_lo < r_hi");
  if (spec.n_ref == 0) throw InvalidParam("n_ref must be positive");

  // A bench that never settles inside the transient window sits above any
  // reachable target, so bisection can still steer off it.
  auto settle = [&](double r) -> double {
    try {
      return measure_settling(spec.n_ref, rates, {Corner::SS, r}, opts).settling_s;
    } catch (const NotSettled&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  double t_lo = settle(spec.r_lo);
  double t_hi = settle(spec.r_hi);
  if (!(t_lo <= spec.target_s && spec.target_s <= t_hi))
    throw CalibrationFailed("target settling time is outside the bracket [" +
                            textio::sci(t_lo) + ", " + textio::sci(t_hi) + "] s");

  double lo = spec.r_lo, hi = spec.r_hi;
  for (int iter = 0; iter < 100; ++iter) {
    double mid = std::sqrt(lo * hi);  // resistances span decades
    double t_mid = settle(mid);
    if (std::abs(t_mid - spec.target_s) <= spec.rel_tolerance * spec.target_s) return mid;
    if (t_mid < spec.target_s)
      lo = mid;
    else
      hi = mid;
  }
  throw CalibrationFailed("bisection exhausted without reaching the target tolerance");
}

SettlingStudy run_settling_study(const std::vector<std::uint32_t>& sizes,
                                 const parasitics::ParasiticRates& rates,
                                 const CalibrationSpec& spec, const TestbenchOptions& opts) {
  if (sizes.empty()) throw InvalidParam("settling study needs at least one size");
  SettlingStudy study;
  study.r_switch_ss = calibrate_switch_resistance(rates, spec, opts);
  auto corners = make_corners(study.r_switch_ss);
  for (std::uint32_t n : sizes)
    for (const CornerModel& c : corners)
      study.results.push_back(measure_settling(n, rates, c, opts));
  return study;
}

}  // namespace rramc::transient
