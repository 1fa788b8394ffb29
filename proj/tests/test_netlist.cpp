#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <string>

#include "rramc/arch.hpp"
#include "rramc/errors.hpp"
#include "rramc/fileio.hpp"
#include "rramc/netlist.hpp"
#include "rramc/parasitics.hpp"
#include "testutil.hpp"

using namespace rramc;
using namespace rramc::netlist;

namespace {

arch::ArrayConfig cfg(std::uint32_t rows, std::uint32_t cols, std::uint32_t bits) {
  return arch::derive_geometry(rows, cols, bits);
}

std::string golden_path(const char* name) {
  return std::string(RRAMC_GOLDEN_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("cell subcircuit shape") {
  Subcircuit cell = build_cell();
  CHECK(cell.name == "rram_cell");
  REQUIRE(cell.ports.size() == 4);
  CHECK(cell.ports[0] == "SEL");
  CHECK(cell.ports[1] == "P");
  CHECK(cell.ports[2] == "N");
  CHECK(cell.ports[3] == "GND_BULK");
  REQUIRE(cell.instances.size() == 2);
  CHECK(cell.instances[0].kind == DeviceKind::Memristor);
  CHECK(cell.instances[0].param("r") == 5.0e6);
  CHECK(cell.instances[1].kind == DeviceKind::Nmos);
  CHECK(cell.instances[1].param("w") == 1.0e-6);
  CHECK(cell.instances[1].param("l") == 0.18e-6);
  CHECK_THROWS_AS(cell.instances[0].param("nope"), InvalidParam);
}

TEST_CASE("ideal array emit matches the golden file byte for byte") {
  Netlist nl = build_array(cfg(2, 2, 1));
  std::string text = emit_spice(nl);
  std::string want = fileio::read_text(golden_path("array_2x2.sp"));
  CHECK(text == want);
}

TEST_CASE("emit is deterministic and parse round trips byte for byte") {
  for (bool extracted : {false, true}) {
    Netlist nl = extracted ? build_extracted_array(cfg(4, 8, 2), parasitics::ParasiticRates{})
                           : build_array(cfg(4, 8, 2));
    std::string a = emit_spice(nl);
    CHECK(a == emit_spice(nl));
    Netlist back = parse_spice(a);
    CHECK(back.title == nl.title);
    CHECK(back.top == nl.top);
    CHECK(emit_spice(back) == a);
  }
}

TEST_CASE("hierarchy and flatten counts") {
  auto c = cfg(4, 8, 2);
  Netlist nl = build_array(c);
  validate(nl);
  CHECK(nl.top == "rram_array");
  REQUIRE(nl.find("rram_row") != nullptr);
  CHECK(nl.find("rram_row")->instances.size() == 8);
  CHECK(nl.find("nonesuch") == nullptr);

  FlatNetlist fn = flatten(nl);
  CHECK(fn.count(DeviceKind::Memristor) == 32);
  CHECK(fn.count(DeviceKind::Nmos) == 32);
  CHECK(fn.count(DeviceKind::SubcktRef) == 0);
  // Nets: 32 internal mid nodes + 4 SEL + 8 P + 8 N + GND_BULK.
  CHECK(fn.net_names.size() == 32 + 4 + 8 + 8 + 1);
  CHECK(fn.top_ports.size() == 4 + 8 + 8 + 1);
  CHECK(fn.net("SEL0") == fn.top_ports[0]);
  CHECK_THROWS_AS(fn.net("nonesuch"), InvalidParam);

  // Flat names carry the instantiation path.
  bool found = false;
  for (const auto& d : fn.devices) found = found || d.name == "r0.c1.Rmem";
  CHECK(found);
}

TEST_CASE("extracted array adds ladders and collapse removes them") {
  auto c = cfg(4, 8, 2);
  auto rates = parasitics::ParasiticRates{};
  Netlist nl = build_extracted_array(c, rates);
  validate(nl);
  FlatNetlist fn = flatten(nl);
  // Ladder resistors: one per cell per line family (SEL rows, P cols, N cols).
  CHECK(fn.count(DeviceKind::Resistor) == 3 * 32);
  CHECK(fn.count(DeviceKind::Capacitor) == 3 * 32);
  CHECK(fn.count(DeviceKind::Memristor) == 32);
  CHECK(fn.count(DeviceKind::Nmos) == 32);

  FlatNetlist ideal = collapse_parasitics(flatten(build_array(c)));
  FlatNetlist coll = collapse_parasitics(fn);
  CHECK(coll.count(DeviceKind::Resistor) == 0);
  CHECK(coll.count(DeviceKind::Capacitor) == 0);
  CHECK(coll.net_names.size() == ideal.net_names.size());
  CHECK(coll.devices.size() == ideal.devices.size());
  // Shorting keeps the lowest-numbered net name of each group, so the
  // driven port names survive collapsing.
  CHECK_NOTHROW(coll.net("SEL0"));
  CHECK_NOTHROW(coll.net("P7"));
  CHECK_NOTHROW(coll.net("GND_BULK"));
}

TEST_CASE("long cards wrap with continuations and reparse") {
  // 16 columns make the row subcircuit port list overflow one line.
  Netlist nl = build_array(cfg(2, 16, 1));
  std::string text = emit_spice(nl);
  CHECK(text.find("\n+ ") != std::string::npos);
  for (std::size_t pos = 0, eol; pos < text.size(); pos = eol + 1) {
    eol = text.find('\n', pos);
    REQUIRE(eol != std::string::npos);
    CHECK(eol - pos <= 100);
  }
  CHECK(emit_spice(parse_spice(text)) == text);
}

TEST_CASE("validate rejects structural mistakes") {
  Netlist nl = build_array(cfg(2, 2, 1));
  SUBCASE("duplicate subcircuit name") {
    nl.subcircuits.push_back(nl.subcircuits[0]);
    CHECK_THROWS_AS(validate(nl), InvalidParam);
  }
  SUBCASE("unknown top") {
    nl.top = "ghost";
    CHECK_THROWS_AS(validate(nl), UnresolvedReference);
  }
  SUBCASE("bad terminal count") {
    nl.subcircuits[0].instances[0].nodes.push_back("extra");
    CHECK_THROWS_AS(validate(nl), InvalidParam);
  }
  SUBCASE("dangling reference") {
    for (auto& s : nl.subcircuits)
      for (auto& i : s.instances)
        if (i.kind == DeviceKind::SubcktRef) i.subckt = "ghost";
    CHECK_THROWS_AS(validate(nl), UnresolvedReference);
  }
  SUBCASE("arity mismatch on reference") {
    for (auto& s : nl.subcircuits)
      for (auto& i : s.instances)
        if (i.kind == DeviceKind::SubcktRef && i.subckt == "rram_cell") i.nodes.pop_back();
    CHECK_THROWS_AS(validate(nl), UnresolvedReference);
  }
  SUBCASE("illegal identifier") {
    nl.subcircuits[0].instances[0].name = "has space";
    CHECK_THROWS_AS(validate(nl), InvalidParam);
  }
}

TEST_CASE("parse_spice reports the offending line") {
  auto line_of = [](const char* text) -> std::string {
    try {
      parse_spice(text);
      return "";
    } catch (const InvalidParam& e) {
      return e.what();
    }
  };
  auto wrap = [](const std::string& card) {
    return "* t\n.SUBCKT s a b\n" + card + "\n.ENDS\n.END\n";
  };
  CHECK(line_of(wrap("R1 a b").c_str()).find("line 3") != std::string::npos);
  CHECK(line_of(wrap("Q1 a b c").c_str()).find("unsupported element") != std::string::npos);
  CHECK(line_of(wrap("R1 a b 1x23").c_str()).find("bad numeric value") != std::string::npos);
  CHECK(line_of(wrap("M1 d g s b nmos W=1u L=2").c_str()).find("line 3") != std::string::npos);
  CHECK(line_of(wrap("M1 d g s b pmos W=1 L=2").c_str()).find("line 3") != std::string::npos);
  CHECK(line_of(wrap(".OPTIONS reltol=1").c_str()).find("unsupported directive") !=
        std::string::npos);
  CHECK(line_of("* t\n.SUBCKT s a\nR1 a b 1\n.END\n").find("unterminated") != std::string::npos);
  CHECK(line_of("* t\n.SUBCKT s a\nR1 a b 1\n.ENDS other\n.END\n").find("line 4") !=
        std::string::npos);
  CHECK(line_of("* t\n+ R1 a b 1\n.END\n").find("continuation") != std::string::npos);
  // Devices outside any subcircuit are not part of the dialect.
  CHECK(line_of("* t\nX1 a b s\n.END\n").find("outside") != std::string::npos);
}

TEST_CASE("parse_spice picks the first unreferenced subcircuit as top") {
  const char* text =
      "* two independent blocks\n"
      ".SUBCKT leaf a b\n"
      "Rload a b 1.000000e+00\n"
      ".ENDS\n"
      ".SUBCKT first_top a b\n"
      "Xu a b leaf\n"
      ".ENDS\n"
      ".SUBCKT second_top a b\n"
      "Xu a b leaf\n"
      ".ENDS\n"
      ".END\n";
  CHECK(parse_spice(text).top == "first_top");
}
