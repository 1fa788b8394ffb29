#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rramc/arch.hpp"
#include "rramc/parasitics.hpp"

namespace rramc::netlist {

// Memristor is kept distinct from plain resistors so structural comparison
// can tell storage devices from parasitics; it still emits as an R card.
enum class DeviceKind : std::uint8_t { Resistor, Capacitor, Memristor, Nmos, SubcktRef };

const char* device_kind_name(DeviceKind k);

struct Instance {
  DeviceKind kind{DeviceKind::Resistor};
  std::string name;                // without the element letter prefix
  std::vector<std::string> nodes;  // R/C/memristor: 2, nmos: d g s b
  std::vector<std::pair<std::string, double>> params;
  std::string subckt;              // SubcktRef only

  double param(std::string_view key) const;  // throws InvalidParam
};

struct Subcircuit {
  std::string name;
  std::vector<std::string> ports;
  std::vector<Instance> instances;
};

struct Netlist {
  std::string title;
  std::vector<Subcircuit> subcircuits;
  std::string top;

  const Subcircuit* find(std::string_view name) const;
};

// Structural checks: unique names, legal identifiers, terminal counts,
// resolvable references with matching arity, reachable top.
void validate(const Netlist& nl);

struct CellParams {
  double memristor_ohms = 5.0e6;
  double nmos_w_m = 1.0e-6;
  double nmos_l_m = 0.18e-6;
};

// One 1T1R bit: memristor from P to an internal node, access NMOS from that
// node to N, gated by SEL, bulk on GND_BULK.
Subcircuit build_cell(const CellParams& cp = {});

// Ideal hierarchical array: rram_cell / rram_row / rram_array.
Netlist build_array(const arch::ArrayConfig& cfg, const CellParams& cp = {});

// Array with distributed line parasitics: every SEL line becomes an RC
// ladder inside its row, every P and N column line an RC ladder at array
// level, with cells hanging off the ladder taps.
Netlist build_extracted_array(const arch::ArrayConfig& cfg,
                              const parasitics::ParasiticRates& rates,
                              const CellParams& cp = {});

// Deterministic SPICE text. Values use fixed %.6e formatting.
std::string emit_spice(const Netlist& nl);

// Reads back the dialect emit_spice writes: a leading '*' title, .SUBCKT /
// .ENDS / .END, R/C/M/X cards, '+' continuations, and trailing '$'
// annotations ("memristor" restores that device kind). The top subcircuit
// is the first one never referenced.
Netlist parse_spice(std::string_view text);

struct FlatDevice {
  DeviceKind kind{DeviceKind::Resistor};
  std::string name;  // hierarchical path, e.g. "r000.c001.Rmem"
  std::vector<std::uint32_t> nets;
  std::vector<std::pair<std::string, double>> params;

  double param(std::string_view key) const;
};

struct FlatNetlist {
  std::vector<std::string> net_names;
  std::vector<FlatDevice> devices;
  std::vector<std::uint32_t> top_ports;  // net ids of the top-level ports

  std::uint32_t net(std::string_view name) const;  // throws InvalidParam
  std::size_t count(DeviceKind k) const;
};

FlatNetlist flatten(const Netlist& nl);

// Shorts every plain resistor and deletes every capacitor, keeping storage
// and access devices on merged nets. Net names keep the lowest-numbered
// member of each merged group, so port names survive.
FlatNetlist collapse_parasitics(const FlatNetlist& fn);

}  // namespace rramc::netlist
