#include <algorithm>
#include <map>

#include "rramc/errors.hpp"
#include "rramc/verify.hpp"

namespace rramc::verify {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ull)); }

// Weisfeiler-Lehman style refinement: device labels absorb terminal net
// labels in role order, net labels absorb the sorted multiset of incident
// (device label, role) pairs. A fixed round count bounds the work; array
// connectivity graphs have tiny diameter so this converges long before.
struct Signatures {
  std::vector<std::uint64_t> nets;
  std::vector<std::uint64_t> devices;
};

Signatures refine(const ConnectivityGraph& g, int rounds) {
  Signatures s;
  s.nets.assign(g.net_names.size(), splitmix64(0x6e6574));
  s.devices.resize(g.devices.size());
  for (std::size_t d = 0; d < g.devices.size(); ++d)
    s.devices[d] = splitmix64(0x646576 + std::uint64_t(g.devices[d].kind));

  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> incident(g.net_names.size());
  for (std::uint32_t d = 0; d < g.devices.size(); ++d) {
    const auto& nets = g.devices[d].nets;
    for (std::uint32_t role = 0; role < nets.size(); ++role) {
      if (nets[role] >= g.net_names.size()) throw InvalidParam("device net id out of range");
      incident[nets[role]].push_back({d, role});
    }
  }

  std::vector<std::uint64_t> next_dev(s.devices.size());
  std::vector<std::uint64_t> next_net(s.nets.size());
  std::vector<std::uint64_t> bag;
  for (int round = 0; round < rounds; ++round) {
    for (std::size_t d = 0; d < g.devices.size(); ++d) {
      std::uint64_t h = splitmix64(0x646576 + std::uint64_t(g.devices[d].kind));
      for (std::size_t role = 0; role < g.devices[d].nets.size(); ++role)
        h = mix(h, s.nets[g.devices[d].nets[role]] + role);
      next_dev[d] = h;
    }
    for (std::size_t n = 0; n < s.nets.size(); ++n) {
      bag.clear();
      for (auto [d, role] : incident[n]) bag.push_back(mix(next_dev[d], role));
      std::sort(bag.begin(), bag.end());
      std::uint64_t h = splitmix64(0x6e6574 + bag.size());
      for (std::uint64_t v : bag) h = mix(h, v);
      next_net[n] = h;
    }
    s.devices.swap(next_dev);
    s.nets.swap(next_net);
  }
  return s;
}

std::size_t device_touched_nets(const ConnectivityGraph& g) {
  std::vector<bool> touched(g.net_names.size(), false);
  for (const auto& d : g.devices)
    for (std::uint32_t n : d.nets) touched[n] = true;
  std::size_t c = 0;
  for (bool b : touched)
    if (b) ++c;
  return c;
}

}  // namespace

ConnectivityGraph graph_from_netlist(const netlist::FlatNetlist& fn) {
  ConnectivityGraph g;
  g.net_names = fn.net_names;
  for (const auto& d : fn.devices) {
    if (d.kind == netlist::DeviceKind::Resistor || d.kind == netlist::DeviceKind::Capacitor)
      throw InvalidParam("collapse parasitics before building a comparison graph");
    g.devices.push_back({d.kind, d.name, d.nets});
  }
  return g;
}

MatchReport compare_graphs(const ConnectivityGraph& layout_side,
                           const ConnectivityGraph& schematic_side) {
  MatchReport rep;

  std::map<netlist::DeviceKind, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& d : layout_side.devices) counts[d.kind].first++;
  for (const auto& d : schematic_side.devices) counts[d.kind].second++;
  for (const auto& [kind, pair] : counts) {
    if (pair.first != pair.second)
      rep.details.push_back(std::string(netlist::device_kind_name(kind)) + " count: layout=" +
                            std::to_string(pair.first) + " schematic=" + std::to_string(pair.second));
  }
  if (!rep.details.empty()) {
    rep.match = false;
    rep.summary = "device counts disagree";
    return rep;
  }

  std::size_t nets_a = device_touched_nets(layout_side);
  std::size_t nets_b = device_touched_nets(schematic_side);
  if (nets_a != nets_b) {
    rep.match = false;
    rep.summary = "net counts disagree";
    rep.details.push_back("connected nets: layout=" + std::to_string(nets_a) +
                          " schematic=" + std::to_string(nets_b));
    return rep;
  }

  Signatures sa = refine(layout_side, 12);
  Signatures sb = refine(schematic_side, 12);
  auto dev_a = sa.devices;
  auto dev_b = sb.devices;
  std::sort(dev_a.begin(), dev_a.end());
  std::sort(dev_b.begin(), dev_b.end());
  if (dev_a != dev_b) {
    rep.match = false;
    rep.summary = "connectivity signatures disagree";
    std::size_t diff = 0;
    for (std::size_t i = 0; i < dev_a.size(); ++i)
      if (dev_a[i] != dev_b[i]) ++diff;
    rep.details.push_back(std::to_string(diff) + " of " + std::to_string(dev_a.size()) +
                          " device signatures differ");
    return rep;
  }
  auto touched_labels = [](const ConnectivityGraph& g, const std::vector<std::uint64_t>& labels) {
    std::vector<bool> touched(g.net_names.size(), false);
    for (const auto& d : g.devices)
      for (std::uint32_t n : d.nets) touched[n] = true;
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (touched[i]) out.push_back(labels[i]);
    std::sort(out.begin(), out.end());
    return out;
  };
  auto net_a = touched_labels(layout_side, sa.nets);
  auto net_b = touched_labels(schematic_side, sb.nets);
  if (net_a != net_b) {
    rep.match = false;
    rep.summary = "net signatures disagree";
    std::size_t diff = 0;
    for (std::size_t i = 0; i < std::min(net_a.size(), net_b.size()); ++i)
      if (net_a[i] != net_b[i]) ++diff;
    diff += std::max(net_a.size(), net_b.size()) - std::min(net_a.size(), net_b.size());
    rep.details.push_back(std::to_string(diff) + " net signatures differ");
    return rep;
  }

  rep.match = true;
  rep.summary = "layout matches schematic: " + std::to_string(layout_side.devices.size()) +
                " devices, " + std::to_string(nets_a) + " connected nets";
  return rep;
}

MatchReport run_lvs(const layout::LayoutDb& db, const layout::CellTemplate& t,
                    const netlist::Netlist& reference) {
  netlist::FlatNetlist flat = netlist::collapse_parasitics(netlist::flatten(reference));
  ConnectivityGraph schematic = graph_from_netlist(flat);
  ConnectivityGraph extracted;
  try {
    extracted = extract_connectivity(db, t);
  } catch (const Error& e) {
    MatchReport rep;
    rep.match = false;
    rep.summary = "extraction failed";
    rep.details.push_back(e.what());
    return rep;
  }
  return compare_graphs(extracted, schematic);
}

std::string lvs_report_text(const MatchReport& report) {
  std::string out;
  out += report.match ? "LVS: MATCH\n" : "LVS: MISMATCH\n";
  out += report.summary + "\n";
  for (const auto& d : report.details) out += "  " + d + "\n";
  return out;
}

}  // namespace rramc::verify
