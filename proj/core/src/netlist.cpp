#include "rramc/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>

#include "rramc/errors.hpp"
#include "rramc/textio.hpp"

namespace rramc::netlist {

namespace {

char element_letter(DeviceKind k) {
  switch (k) {
    case DeviceKind::Resistor:
    case DeviceKind::Memristor: return 'R';
    case DeviceKind::Capacitor: return 'C';
    case DeviceKind::Nmos: return 'M';
    case DeviceKind::SubcktRef: return 'X';
  }
  return '?';
}

std::size_t terminal_count(DeviceKind k) {
  switch (k) {
    case DeviceKind::Resistor:
    case DeviceKind::Memristor:
    case DeviceKind::Capacitor: return 2;
    case DeviceKind::Nmos: return 4;
    case DeviceKind::SubcktRef: return 0;  // checked against the definition
  }
  return 0;
}

bool legal_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

int digits(std::uint64_t v) {
  int d = 1;
  while (v >= 10) {
    v /= 10;
    ++d;
  }
  return d;
}

}  // namespace

const char* device_kind_name(DeviceKind k) {
  switch (k) {
    case DeviceKind::Resistor: return "resistor";
    case DeviceKind::Capacitor: return "capacitor";
    case DeviceKind::Memristor: return "memristor";
    case DeviceKind::Nmos: return "nmos";
    case DeviceKind::SubcktRef: return "subckt";
  }
  return "?";
}

double Instance::param(std::string_view key) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  throw InvalidParam("instance '" + name + "' lacks parameter '" + std::string(key) + "'");
}

double FlatDevice::param(std::string_view key) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  throw InvalidParam("device '" + name + "' lacks parameter '" + std::string(key) + "'");
}

const Subcircuit* Netlist::find(std::string_view name) const {
  for (const auto& sc : subcircuits)
    if (sc.name == name) return &sc;
  return nullptr;
}

void validate(const Netlist& nl) {
  if (nl.subcircuits.empty()) throw InvalidParam("netlist has no subcircuits");
  std::set<std::string> sub_names;
  for (const auto& sc : nl.subcircuits) {
    if (!legal_identifier(sc.name)) throw InvalidParam("bad subcircuit name '" + sc.name + "'");
    if (!sub_names.insert(sc.name).second)
      throw InvalidParam("duplicate subcircuit '" + sc.name + "'");
  }
  if (!nl.find(nl.top)) throw UnresolvedReference("top subcircuit '" + nl.top + "' not defined");

  for (const auto& sc : nl.subcircuits) {
    std::set<std::string> port_names;
    for (const auto& p : sc.ports) {
      if (!legal_identifier(p))
        throw InvalidParam("bad port name '" + p + "' in subcircuit '" + sc.name + "'");
      if (!port_names.insert(p).second)
        throw InvalidParam("duplicate port '" + p + "' in subcircuit '" + sc.name + "'");
    }
    std::set<std::string> card_names;
    for (const auto& inst : sc.instances) {
      if (!legal_identifier(inst.name))
        throw InvalidParam("bad instance name '" + inst.name + "' in '" + sc.name + "'");
      std::string card = element_letter(inst.kind) + inst.name;
      if (!card_names.insert(card).second)
        throw InvalidParam("duplicate card '" + card + "' in subcircuit '" + sc.name + "'");
      for (const auto& n : inst.nodes)
        if (!legal_identifier(n))
          throw InvalidParam("bad node name '" + n + "' on instance '" + inst.name + "'");
      if (inst.kind == DeviceKind::SubcktRef) {
        const Subcircuit* target = nl.find(inst.subckt);
        if (!target)
          throw UnresolvedReference("instance '" + inst.name + "' references undefined subcircuit '" +
                                    inst.subckt + "'");
        if (inst.nodes.size() != target->ports.size())
          throw UnresolvedReference("instance '" + inst.name + "' connects " +
                                    std::to_string(inst.nodes.size()) + " nodes but '" +
                                    inst.subckt + "' has " + std::to_string(target->ports.size()) +
                                    " ports");
      } else {
        if (inst.nodes.size() != terminal_count(inst.kind))
          throw InvalidParam("instance '" + inst.name + "' has wrong terminal count");
        switch (inst.kind) {
          case DeviceKind::Resistor:
          case DeviceKind::Memristor:
            if (!(inst.param("r") > 0)) throw InvalidParam("non-positive resistance on '" + inst.name + "'");
            break;
          case DeviceKind::Capacitor:
            if (!(inst.param("c") > 0)) throw InvalidParam("non-positive capacitance on '" + inst.name + "'");
            break;
          case DeviceKind::Nmos:
            if (!(inst.param("w") > 0) || !(inst.param("l") > 0))
              throw InvalidParam("non-positive W/L on '" + inst.name + "'");
            break;
          default: break;
        }
      }
    }
  }

  // Reference cycles would make flattening diverge.
  std::map<std::string, int> state;  // 0 unvisited, 1 in progress, 2 done
  auto dfs = [&](auto&& self, const Subcircuit& sc) -> void {
    state[sc.name] = 1;
    for (const auto& inst : sc.instances) {
      if (inst.kind != DeviceKind::SubcktRef) continue;
      const Subcircuit* target = nl.find(inst.subckt);
      int s = state[target->name];
      if (s == 1) throw UnresolvedReference("recursive subcircuit '" + target->name + "'");
      if (s == 0) self(self, *target);
    }
    state[sc.name] = 2;
  };
  dfs(dfs, *nl.find(nl.top));
}

Subcircuit build_cell(const CellParams& cp) {
  if (!(cp.memristor_ohms > 0)) throw InvalidParam("memristor_ohms must be positive");
  if (!(cp.nmos_w_m > 0) || !(cp.nmos_l_m > 0)) throw InvalidParam("NMOS W and L must be positive");
  Subcircuit sc;
  sc.name = "rram_cell";
  sc.ports = {"SEL", "P", "N", "GND_BULK"};
  sc.instances.push_back({DeviceKind::Memristor, "mem", {"P", "mid"}, {{"r", cp.memristor_ohms}}, {}});
  sc.instances.push_back({DeviceKind::Nmos,
                          "acc",
                          {"mid", "SEL", "N", "GND_BULK"},
                          {{"w", cp.nmos_w_m}, {"l", cp.nmos_l_m}},
                          {}});
  return sc;
}

namespace {

std::string title_for(const arch::ArrayConfig& cfg, bool extracted) {
  std::string t = std::to_string(cfg.rows) + "x" + std::to_string(cfg.cols) +
                  " 1T1R array, word_bits=" + std::to_string(cfg.word_bits);
  if (extracted) t += ", with distributed line parasitics";
  return t;
}

}  // namespace

Netlist build_array(const arch::ArrayConfig& cfg, const CellParams& cp) {
  int pr = textio::index_width(cfg.rows);
  int pc = textio::index_width(cfg.cols);

  Netlist nl;
  nl.title = title_for(cfg, false);
  nl.subcircuits.push_back(build_cell(cp));

  Subcircuit row;
  row.name = "rram_row";
  row.ports.push_back("SEL");
  for (std::uint32_t j = 0; j < cfg.cols; ++j) row.ports.push_back(line_name(LineKind::P, j, pc));
  for (std::uint32_t j = 0; j < cfg.cols; ++j) row.ports.push_back(line_name(LineKind::N, j, pc));
  row.ports.push_back("GND_BULK");
  for (std::uint32_t j = 0; j < cfg.cols; ++j) {
    Instance inst;
    inst.kind = DeviceKind::SubcktRef;
    inst.name = "c" + textio::pad(j, pc);
    inst.subckt = "rram_cell";
    inst.nodes = {"SEL", line_name(LineKind::P, j, pc), line_name(LineKind::N, j, pc), "GND_BULK"};
    row.instances.push_back(std::move(inst));
  }
  nl.subcircuits.push_back(std::move(row));

  Subcircuit top;
  top.name = "rram_array";
  for (std::uint32_t i = 0; i < cfg.rows; ++i) top.ports.push_back(line_name(LineKind::SEL, i, pr));
  for (std::uint32_t j = 0; j < cfg.cols; ++j) top.ports.push_back(line_name(LineKind::P, j, pc));
  for (std::uint32_t j = 0; j < cfg.cols; ++j) top.ports.push_back(line_name(LineKind::N, j, pc));
  top.ports.push_back("GND_BULK");
  for (std::uint32_t i = 0; i < cfg.rows; ++i) {
    Instance inst;
    inst.kind = DeviceKind::SubcktRef;
    inst.name = "r" + textio::pad(i, pr);
    inst.subckt = "rram_row";
    inst.nodes.push_back(line_name(LineKind::SEL, i, pr));
    for (std::uint32_t j = 0; j < cfg.cols; ++j) inst.nodes.push_back(line_name(LineKind::P, j, pc));
    for (std::uint32_t j = 0; j < cfg.cols; ++j) inst.nodes.push_back(line_name(LineKind::N, j, pc));
    inst.nodes.push_back("GND_BULK");
    top.instances.push_back(std::move(inst));
  }
  nl.subcircuits.push_back(std::move(top));
  nl.top = "rram_array";
  validate(nl);
  return nl;
}

Netlist build_extracted_array(const arch::ArrayConfig& cfg,
                              const parasitics::ParasiticRates& rates, const CellParams& cp) {
  rates.validate();
  int pr = textio::index_width(cfg.rows);
  int pc = textio::index_width(cfg.cols);
  int pl_row = digits(cfg.cols);  // ladder tap index along a row, 1-based
  int pl_col = digits(cfg.rows);  // ladder tap index along a column, 1-based

  double r_sel = parasitics::res_rate(rates, LineKind::SEL);
  double c_sel = parasitics::cap_rate(rates, LineKind::SEL);
  double r_p = parasitics::res_rate(rates, LineKind::P);
  double c_p = parasitics::cap_rate(rates, LineKind::P);
  double r_n = parasitics::res_rate(rates, LineKind::N);
  double c_n = parasitics::cap_rate(rates, LineKind::N);

  Netlist nl;
  nl.title = title_for(cfg, true);
  nl.subcircuits.push_back(build_cell(cp));

  Subcircuit row;
  row.name = "rram_row_ext";
  row.ports.push_back("SEL");
  for (std::uint32_t j = 0; j < cfg.cols; ++j) row.ports.push_back(line_name(LineKind::P, j, pc));
  for (std::uint32_t j = 0; j < cfg.cols; ++j) row.ports.push_back(line_name(LineKind::N, j, pc));
  row.ports.push_back("GND_BULK");
  std::string prev = "SEL";
  for (std::uint32_t j = 0; j < cfg.cols; ++j) {
    std::string tap = "sel_" + textio::pad(j + 1, pl_row);
    row.instances.push_back(
        {DeviceKind::Resistor, "sel" + textio::pad(j + 1, pl_row), {prev, tap}, {{"r", r_sel}}, {}});
    row.instances.push_back(
        {DeviceKind::Capacitor, "sel" + textio::pad(j + 1, pl_row), {tap, "GND_BULK"}, {{"c", c_sel}}, {}});
    prev = tap;
  }
  for (std::uint32_t j = 0; j < cfg.cols; ++j) {
    Instance inst;
    inst.kind = DeviceKind::SubcktRef;
    inst.name = "c" + textio::pad(j, pc);
    inst.subckt = "rram_cell";
    inst.nodes = {"sel_" + textio::pad(j + 1, pl_row), line_name(LineKind::P, j, pc),
                  line_name(LineKind::N, j, pc), "GND_BULK"};
    row.instances.push_back(std::move(inst));
  }
  nl.subcircuits.push_back(std::move(row));

  Subcircuit top;
  top.name = "rram_array_ext";
  for (std::uint32_t i = 0; i < cfg.rows; ++i) top.ports.push_back(line_name(LineKind::SEL, i, pr));
  for (std::uint32_t j = 0; j < cfg.cols; ++j) top.ports.push_back(line_name(LineKind::P, j, pc));
  for (std::uint32_t j = 0; j < cfg.cols; ++j) top.ports.push_back(line_name(LineKind::N, j, pc));
  top.ports.push_back("GND_BULK");

  auto column_ladder = [&](LineKind kind, std::uint32_t j, double r, double c) {
    std::string base = (kind == LineKind::P ? "p" : "n");
    std::string prev_net = line_name(kind, j, pc);
    for (std::uint32_t i = 0; i < cfg.rows; ++i) {
      std::string idx = textio::pad(j, pc) + "_" + textio::pad(i + 1, pl_col);
      std::string tap = base + "t_" + idx;
      top.instances.push_back({DeviceKind::Resistor, base + idx, {prev_net, tap}, {{"r", r}}, {}});
      top.instances.push_back({DeviceKind::Capacitor, base + idx, {tap, "GND_BULK"}, {{"c", c}}, {}});
      prev_net = tap;
    }
  };
  for (std::uint32_t j = 0; j < cfg.cols; ++j) column_ladder(LineKind::P, j, r_p, c_p);
  for (std::uint32_t j = 0; j < cfg.cols; ++j) column_ladder(LineKind::N, j, r_n, c_n);

  for (std::uint32_t i = 0; i < cfg.rows; ++i) {
    Instance inst;
    inst.kind = DeviceKind::SubcktRef;
    inst.name = "r" + textio::pad(i, pr);
    inst.subckt = "rram_row_ext";
    inst.nodes.push_back(line_name(LineKind::SEL, i, pr));
    for (std::uint32_t j = 0; j < cfg.cols; ++j)
      inst.nodes.push_back("pt_" + textio::pad(j, pc) + "_" + textio::pad(i + 1, pl_col));
    for (std::uint32_t j = 0; j < cfg.cols; ++j)
      inst.nodes.push_back("nt_" + textio::pad(j, pc) + "_" + textio::pad(i + 1, pl_col));
    inst.nodes.push_back("GND_BULK");
    top.instances.push_back(std::move(inst));
  }
  nl.subcircuits.push_back(std::move(top));
  nl.top = "rram_array_ext";
  validate(nl);
  return nl;
}

namespace {

// SPICE line continuation: wrap near 100 columns, continuation lines begin "+ ".
void emit_wrapped(std::string& out, const std::vector<std::string>& tokens) {
  std::size_t col = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (i == 0) {
      out += tok;
      col = tok.size();
      continue;
    }
    if (col + 1 + tok.size() > 100) {
      out += "\n+ ";
      col = 2;
    } else {
      out += ' ';
      col += 1;
    }
    out += tok;
    col += tok.size();
  }
  out += '\n';
}

}  // namespace

std::string emit_spice(const Netlist& nl) {
  validate(nl);
  std::string out;
  out += "* " + nl.title + "\n";
  for (const auto& sc : nl.subcircuits) {
    out += '\n';
    std::vector<std::string> header = {".SUBCKT", sc.name};
    header.insert(header.end(), sc.ports.begin(), sc.ports.end());
    emit_wrapped(out, header);
    for (const auto& inst : sc.instances) {
      std::vector<std::string> card;
      card.push_back(element_letter(inst.kind) + inst.name);
      card.insert(card.end(), inst.nodes.begin(), inst.nodes.end());
      switch (inst.kind) {
        case DeviceKind::Resistor:
          card.push_back(textio::sci(inst.param("r")));
          break;
        case DeviceKind::Memristor:
          card.push_back(textio::sci(inst.param("r")));
          card.push_back("$");
          card.push_back("memristor");
          break;
        case DeviceKind::Capacitor:
          card.push_back(textio::sci(inst.param("c")));
          break;
        case DeviceKind::Nmos:
          card.push_back("nmos");
          card.push_back("W=" + textio::sci(inst.param("w")));
          card.push_back("L=" + textio::sci(inst.param("l")));
          break;
        case DeviceKind::SubcktRef:
          card.push_back(inst.subckt);
          break;
      }
      emit_wrapped(out, card);
    }
    out += ".ENDS " + sc.name + "\n";
  }
  out += "\n.END\n";
  return out;
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
  throw InvalidParam("spice line " + std::to_string(line_no) + ": " + msg);
}

double parse_spice_value(std::string_view tok, std::size_t line_no) {
  std::string buf(tok);
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno == ERANGE || !std::isfinite(v))
    parse_fail(line_no, "bad numeric value '" + buf + "'");
  return v;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = char(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Netlist parse_spice(std::string_view text) {
  struct Card {
    std::size_t line_no;
    std::string text;
  };
  std::vector<Card> cards;
  Netlist nl;

  std::size_t line_no = 0;
  bool saw_any = false;
  for (std::string_view raw : textio::split(text, '\n')) {
    ++line_no;
    std::string_view line = textio::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '*') {
      // The first comment line is the title.
      if (!saw_any) nl.title = std::string(textio::trim(line.substr(1)));
      saw_any = true;
      continue;
    }
    saw_any = true;
    if (line.front() == '+') {
      if (cards.empty()) parse_fail(line_no, "continuation with nothing to continue");
      cards.back().text += ' ';
      cards.back().text += textio::trim(line.substr(1));
    } else {
      cards.push_back({line_no, std::string(line)});
    }
  }

  Subcircuit* cur = nullptr;
  for (const Card& card : cards) {
    auto toks = textio::split_ws(card.text);
    std::string head = upper(toks[0]);
    if (head == ".SUBCKT") {
      if (cur) parse_fail(card.line_no, "nested .SUBCKT");
      if (toks.size() < 2) parse_fail(card.line_no, ".SUBCKT needs a name");
      Subcircuit sc;
      sc.name = std::string(toks[1]);
      for (std::size_t i = 2; i < toks.size(); ++i) sc.ports.emplace_back(toks[i]);
      nl.subcircuits.push_back(std::move(sc));
      cur = &nl.subcircuits.back();
      continue;
    }
    if (head == ".ENDS") {
      if (!cur) parse_fail(card.line_no, ".ENDS without .SUBCKT");
      if (toks.size() > 1 && std::string_view(cur->name) != toks[1])
        parse_fail(card.line_no, ".ENDS name disagrees with .SUBCKT");
      cur = nullptr;
      continue;
    }
    if (head == ".END") break;
    if (head.front() == '.') parse_fail(card.line_no, "unsupported directive '" + head + "'");
    if (!cur) parse_fail(card.line_no, "device card outside .SUBCKT");

    // Split off a trailing "$ annotation".
    std::string annotation;
    std::size_t n_toks = toks.size();
    for (std::size_t i = 1; i < toks.size(); ++i) {
      if (toks[i] == "$") {
        for (std::size_t j = i + 1; j < toks.size(); ++j) {
          if (!annotation.empty()) annotation += ' ';
          annotation += std::string(toks[j]);
        }
        n_toks = i;
        break;
      }
    }

    Instance inst;
    char letter = char(std::toupper(static_cast<unsigned char>(toks[0].front())));
    inst.name = std::string(toks[0].substr(1));
    if (inst.name.empty()) parse_fail(card.line_no, "device card needs a name");
    switch (letter) {
      case 'R': {
        if (n_toks != 4) parse_fail(card.line_no, "resistor card expects 2 nodes and a value");
        inst.kind = annotation == "memristor" ? DeviceKind::Memristor : DeviceKind::Resistor;
        inst.nodes = {std::string(toks[1]), std::string(toks[2])};
        inst.params = {{"r", parse_spice_value(toks[3], card.line_no)}};
        break;
      }
      case 'C': {
        if (n_toks != 4) parse_fail(card.line_no, "capacitor card expects 2 nodes and a value");
        inst.kind = DeviceKind::Capacitor;
        inst.nodes = {std::string(toks[1]), std::string(toks[2])};
        inst.params = {{"c", parse_spice_value(toks[3], card.line_no)}};
        break;
      }
      case 'M': {
        if (n_toks != 8 || upper(toks[5]) != "NMOS")
          parse_fail(card.line_no, "mosfet card expects 4 nodes, model nmos, W= and L=");
        inst.kind = DeviceKind::Nmos;
        inst.nodes = {std::string(toks[1]), std::string(toks[2]), std::string(toks[3]),
                      std::string(toks[4])};
        for (std::size_t i = 6; i < 8; ++i) {
          auto eq = toks[i].find('=');
          if (eq == std::string_view::npos) parse_fail(card.line_no, "expected key=value");
          std::string key = upper(toks[i].substr(0, eq));
          if (key != "W" && key != "L") parse_fail(card.line_no, "unknown parameter '" + key + "'");
          inst.params.emplace_back(key == "W" ? "w" : "l",
                                   parse_spice_value(toks[i].substr(eq + 1), card.line_no));
        }
        break;
      }
      case 'X': {
        if (n_toks < 2) parse_fail(card.line_no, "subcircuit call expects a target");
        inst.kind = DeviceKind::SubcktRef;
        for (std::size_t i = 1; i + 1 < n_toks; ++i) inst.nodes.emplace_back(toks[i]);
        inst.subckt = std::string(toks[n_toks - 1]);
        break;
      }
      default:
        parse_fail(card.line_no, std::string("unsupported element '") + toks[0].front() + "'");
    }
    cur->instances.push_back(std::move(inst));
  }
  if (cur) parse_fail(line_no, "unterminated .SUBCKT '" + cur->name + "'");

  std::set<std::string> referenced;
  for (const auto& sc : nl.subcircuits)
    for (const auto& inst : sc.instances)
      if (inst.kind == DeviceKind::SubcktRef) referenced.insert(inst.subckt);
  for (const auto& sc : nl.subcircuits) {
    if (!referenced.count(sc.name)) {
      nl.top = sc.name;
      break;
    }
  }
  validate(nl);
  return nl;
}

namespace {

struct Expander {
  const Netlist& nl;
  FlatNetlist& out;

  std::uint32_t new_net(const std::string& name) {
    out.net_names.push_back(name);
    return static_cast<std::uint32_t>(out.net_names.size() - 1);
  }

  void expand(const Subcircuit& sc, const std::string& prefix,
              const std::vector<std::uint32_t>& port_nets) {
    std::map<std::string, std::uint32_t> local;
    for (std::size_t i = 0; i < sc.ports.size(); ++i) local[sc.ports[i]] = port_nets[i];
    auto bind = [&](const std::string& node) {
      auto it = local.find(node);
      if (it != local.end()) return it->second;
      std::uint32_t id = new_net(prefix + node);
      local.emplace(node, id);
      return id;
    };
    for (const auto& inst : sc.instances) {
      if (inst.kind == DeviceKind::SubcktRef) {
        std::vector<std::uint32_t> child_ports;
        child_ports.reserve(inst.nodes.size());
        for (const auto& n : inst.nodes) child_ports.push_back(bind(n));
        expand(*nl.find(inst.subckt), prefix + inst.name + ".", child_ports);
      } else {
        FlatDevice dev;
        dev.kind = inst.kind;
        dev.name = prefix;
        dev.name += element_letter(inst.kind);
        dev.name += inst.name;
        dev.params = inst.params;
        for (const auto& n : inst.nodes) dev.nets.push_back(bind(n));
        out.devices.push_back(std::move(dev));
      }
    }
  }
};

}  // namespace

std::uint32_t FlatNetlist::net(std::string_view name) const {
  for (std::size_t i = 0; i < net_names.size(); ++i)
    if (net_names[i] == name) return static_cast<std::uint32_t>(i);
  throw InvalidParam("no net named '" + std::string(name) + "'");
}

std::size_t FlatNetlist::count(DeviceKind k) const {
  std::size_t n = 0;
  for (const auto& d : devices)
    if (d.kind == k) ++n;
  return n;
}

FlatNetlist flatten(const Netlist& nl) {
  validate(nl);
  FlatNetlist fn;
  const Subcircuit& top = *nl.find(nl.top);
  Expander ex{nl, fn};
  std::vector<std::uint32_t> port_nets;
  port_nets.reserve(top.ports.size());
  for (const auto& p : top.ports) port_nets.push_back(ex.new_net(p));
  fn.top_ports = port_nets;
  ex.expand(top, "", port_nets);
  return fn;
}

FlatNetlist collapse_parasitics(const FlatNetlist& fn) {
  std::vector<std::uint32_t> parent(fn.net_names.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the lower id as the class root
    parent[b] = a;
  };
  for (const auto& d : fn.devices)
    if (d.kind == DeviceKind::Resistor) unite(d.nets[0], d.nets[1]);

  FlatNetlist out;
  std::vector<std::uint32_t> remap(fn.net_names.size(), UINT32_MAX);
  auto mapped = [&](std::uint32_t old) {
    std::uint32_t root = find(old);
    if (remap[root] == UINT32_MAX) {
      out.net_names.push_back(fn.net_names[root]);
      remap[root] = static_cast<std::uint32_t>(out.net_names.size() - 1);
    }
    return remap[root];
  };
  // Ports first so their ids stay low and their names are the class names.
  for (std::uint32_t p : fn.top_ports) out.top_ports.push_back(mapped(p));
  for (const auto& d : fn.devices) {
    if (d.kind == DeviceKind::Resistor || d.kind == DeviceKind::Capacitor) continue;
    FlatDevice nd;
    nd.kind = d.kind;
    nd.name = d.name;
    nd.params = d.params;
    for (std::uint32_t n : d.nets) nd.nets.push_back(mapped(n));
    out.devices.push_back(std::move(nd));
  }
  return out;
}

}  // namespace rramc::netlist
