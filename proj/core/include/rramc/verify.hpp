#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rramc/keyval.hpp"
#include "rramc/layout.hpp"
#include "rramc/netlist.hpp"

namespace rramc::verify {

// Geometric rules in micrometers, keyed by lowercase layer name.
struct RuleDeck {
  std::vector<std::pair<std::string, double>> min_width_um;
  std::vector<std::pair<std::string, double>> min_spacing_um;

  // 0 when the layer has no rule of that kind.
  double width_for(std::string_view layer) const;
  double spacing_for(std::string_view layer) const;

  static RuleDeck defaults();
  friend bool operator==(const RuleDeck&, const RuleDeck&) = default;
};

// Keys look like "m1.min_width_um = 0.22".
RuleDeck rules_from_doc(const keyval::Document& doc);
RuleDeck load_rules(const std::string& path);
std::string serialize(const RuleDeck& deck);

enum class ViolationKind : std::uint8_t { Width, Spacing };

struct Violation {
  ViolationKind kind{ViolationKind::Width};
  std::string layer;
  layout::Rect a;
  layout::Rect b;  // equals a for width violations
  double measured_um = 0.0;
  double required_um = 0.0;
  friend bool operator==(const Violation&, const Violation&) = default;
};

// Flattens the database and checks per-rectangle minimum width and pairwise
// same-layer Euclidean spacing. Touching rectangles merge into one net and
// are exempt from spacing; a gap exactly at the minimum is compliant.
// Results are deterministically ordered.
std::vector<Violation> run_drc(const layout::LayoutDb& db, const RuleDeck& deck);

std::string drc_report_text(const std::vector<Violation>& violations, const RuleDeck& deck);
std::string drc_report_csv(const std::vector<Violation>& violations);

// Device-level connectivity recovered from geometry. Terminal order is
// significant: memristor (P, mid), access transistor (mid, SEL, N, GND_BULK).
struct ExtractedDevice {
  netlist::DeviceKind kind{netlist::DeviceKind::Memristor};
  std::string name;
  std::vector<std::uint32_t> nets;
  friend bool operator==(const ExtractedDevice&, const ExtractedDevice&) = default;
};

struct ConnectivityGraph {
  std::vector<std::string> net_names;
  std::vector<ExtractedDevice> devices;
};

// Recovers cell placements from the tiling grid, merges touching same-layer
// rectangles into nets, and binds each cell's port strips. The transistor
// gate connects through the SEL strip; the cell-internal node and the
// bulk/ground net have no drawn geometry and are synthesized. Throws
// DisconnectedPort when a port strip touches no metal.
ConnectivityGraph extract_connectivity(const layout::LayoutDb& db, const layout::CellTemplate& t);

// Same graph form derived from a flattened netlist; parasitics must already
// be collapsed (plain resistors or capacitors are rejected).
ConnectivityGraph graph_from_netlist(const netlist::FlatNetlist& fn);

struct MatchReport {
  bool match = false;
  std::string summary;
  std::vector<std::string> details;
};

// Signature-refinement isomorphism check between two connectivity graphs.
MatchReport compare_graphs(const ConnectivityGraph& layout_side,
                           const ConnectivityGraph& schematic_side);

// Extraction plus comparison against the flattened (and parasitic-collapsed)
// reference netlist. Extraction failures are reported as mismatches.
MatchReport run_lvs(const layout::LayoutDb& db, const layout::CellTemplate& t,
                    const netlist::Netlist& reference);

std::string lvs_report_text(const MatchReport& report);

struct FaultInfo {
  std::string kind;  // "shrink", "delete", or "move"
  std::string description;
  layout::Rect victim;
};

// Returns a flattened copy of the database with exactly one seeded geometric
// fault: a strip shrunk below minimum width, a deleted port-layer strip, or
// a strip moved to 140 nm from its nearest neighbor. Same seed, same fault.
layout::LayoutDb inject_fault(const layout::LayoutDb& db, const layout::CellTemplate& t,
                              std::uint64_t seed, FaultInfo* info = nullptr);

}  // namespace rramc::verify
