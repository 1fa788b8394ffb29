// rramc: generate, verify, and characterize 1T1R memory arrays.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rramc/arch.hpp"
#include "rramc/errors.hpp"
#include "rramc/fileio.hpp"
#include "rramc/gdsii.hpp"
#include "rramc/keyval.hpp"
#include "rramc/layout.hpp"
#include "rramc/netlist.hpp"
#include "rramc/parasitics.hpp"
#include "rramc/report.hpp"
#include "rramc/textio.hpp"
#include "rramc/transient.hpp"
#include "rramc/verify.hpp"

namespace {

using namespace rramc;

// Exit codes, fixed for scripting:
//   0 ok, 1 unexpected error, 2 config error, 3 artifact failure,
//   4 DRC violations, 5 LVS mismatch, 6 characterization failure,
//   7 protocol script error.
enum ExitCode {
  kOk = 0,
  kUnexpected = 1,
  kConfig = 2,
  kArtifact = 3,
  kDrc = 4,
  kLvs = 5,
  kCharacterize = 6,
  kScript = 7,
};

// Raw command-line values; zero / empty means "not given" so the config
// file and built-in defaults can fill the gap (flags > file > defaults).
struct Cli {
  std::string config_path;
  std::string out;
  std::string rates_path;
  std::string rules_path;
  std::string corner;
  std::string sizes;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t word_bits = 0;
  std::string script_path;
  std::uint64_t fault_seed = 0;
  bool fault_given = false;
};

struct Resolved {
  arch::ArrayConfig cfg;
  std::string out;
  parasitics::ParasiticRates rates;
  verify::RuleDeck rules;
  layout::CellTemplate tmpl;
  std::vector<transient::Corner> corners;
  std::vector<std::uint32_t> sizes;
};

void add_common(CLI::App* sub, Cli& c) {
  sub->add_option("--config", c.config_path, "key=value config file");
  sub->add_option("--rows", c.rows, "array rows (power of two)");
  sub->add_option("--cols", c.cols, "array columns (word-bits times a power of two)");
  sub->add_option("--word-bits", c.word_bits, "bits per word");
  sub->add_option("--out", c.out, "output directory (falls back to $RRAMC_OUT, then ./out)");
  sub->add_option("--rates", c.rates_path, "parasitic rates file");
  sub->add_option("--rules", c.rules_path, "DRC rule deck file");
  sub->add_option("--corner", c.corner, "corner selection: SS, TT, FF, or all");
  sub->add_option("--sizes", c.sizes, "comma-separated characterization sizes");
}

std::vector<transient::Corner> parse_corners(const std::string& s) {
  if (s == "all")
    return {transient::Corner::SS, transient::Corner::TT, transient::Corner::FF};
  if (s == "SS") return {transient::Corner::SS};
  if (s == "TT") return {transient::Corner::TT};
  if (s == "FF") return {transient::Corner::FF};
  throw ConfigError("corner must be SS, TT, FF, or all (got '" + s + "')");
}

std::vector<std::uint32_t> parse_sizes(const std::string& s) {
  std::vector<std::uint32_t> sizes;
  for (std::string_view tok : textio::split(s, ',')) {
    tok = textio::trim(tok);
    if (tok.empty()) continue;
    unsigned long v = textio::parse_uint(tok);
    if (v == 0 || v > 1u << 20) throw ConfigError("sweep size out of range: " + std::string(tok));
    sizes.push_back(static_cast<std::uint32_t>(v));
  }
  if (sizes.empty()) throw ConfigError("--sizes must name at least one size");
  return sizes;
}

Resolved resolve(const Cli& c) {
  std::uint32_t rows = 8, cols = 8, word_bits = 8;
  std::string out, rates_path, rules_path;
  std::string corner = "all", sizes = "8,16,32,64,128";

  if (!c.config_path.empty()) {
    keyval::Document doc = keyval::load_file(c.config_path);
    rows = static_cast<std::uint32_t>(doc.get_uint("rows", rows));
    cols = static_cast<std::uint32_t>(doc.get_uint("cols", cols));
    word_bits = static_cast<std::uint32_t>(doc.get_uint("word_bits", word_bits));
    out = doc.get_string("out", out);
    rates_path = doc.get_string("rates", rates_path);
    rules_path = doc.get_string("rules", rules_path);
    corner = doc.get_string("corner", corner);
    sizes = doc.get_string("sizes", sizes);
  }
  if (c.rows) rows = c.rows;
  if (c.cols) cols = c.cols;
  if (c.word_bits) word_bits = c.word_bits;
  if (!c.out.empty()) out = c.out;
  if (!c.rates_path.empty()) rates_path = c.rates_path;
  if (!c.rules_path.empty()) rules_path = c.rules_path;
  if (!c.corner.empty()) corner = c.corner;
  if (!c.sizes.empty()) sizes = c.sizes;
  if (out.empty()) {
    if (const char* env = std::getenv("RRAMC_OUT")) out = env;
  }
  if (out.empty()) out = "out";

  Resolved r;
  r.cfg = arch::derive_geometry(rows, cols, word_bits);
  r.out = out;
  r.rates = rates_path.empty() ? parasitics::ParasiticRates::defaults()
                               : parasitics::load_rates(rates_path);
  r.rules = rules_path.empty() ? verify::RuleDeck::defaults() : verify::load_rules(rules_path);
  r.tmpl = layout::default_template();
  r.corners = parse_corners(corner);
  r.sizes = parse_sizes(sizes);
  return r;
}

std::string sizes_string(const std::vector<std::uint32_t>& sizes) {
  std::string s;
  for (std::uint32_t n : sizes) {
    if (!s.empty()) s += ',';
    s += std::to_string(n);
  }
  return s;
}

std::string corners_string(const std::vector<transient::Corner>& corners) {
  if (corners.size() == 3) return "all";
  return transient::corner_name(corners.front());
}

// Every run pins its effective configuration next to the artifacts. The
// output path itself is deliberately not echoed so two trees generated from
// the same parameters compare byte-identical.
void write_resolved(const Resolved& r) {
  keyval::Document doc;
  doc.set("rows", std::to_string(r.cfg.rows));
  doc.set("cols", std::to_string(r.cfg.cols));
  doc.set("word_bits", std::to_string(r.cfg.word_bits));
  doc.set("corner", corners_string(r.corners));
  doc.set("sizes", sizes_string(r.sizes));
  doc.merge_from(keyval::parse(parasitics::serialize(r.rates)));
  doc.merge_from(keyval::parse(verify::serialize(r.rules)));
  fileio::write_text(r.out + "/config.resolved", doc.serialize());
}

int cmd_generate(const Resolved& r) {
  for (const char* sub : {"/netlist", "/layout", "/drc", "/lvs", "/pex"})
    fileio::ensure_dir(r.out + sub);

  netlist::Netlist ideal = netlist::build_array(r.cfg);
  fileio::write_text(r.out + "/netlist/array.sp", netlist::emit_spice(ideal));
  netlist::Netlist extracted = netlist::build_extracted_array(r.cfg, r.rates);
  fileio::write_text(r.out + "/netlist/array_extracted.sp", netlist::emit_spice(extracted));

  layout::LayoutDb db = layout::tile_array(r.cfg, r.tmpl);
  gdsii::write_file(db, r.out + "/layout/array.gds");
  fileio::write_text(r.out + "/layout/array.svg", layout::render_svg(db));
  write_resolved(r);

  std::printf("generated %ux%u array (word_bits=%u) into %s\n", r.cfg.rows, r.cfg.cols,
              r.cfg.word_bits, r.out.c_str());
  for (const char* p : {"/netlist/array.sp", "/netlist/array_extracted.sp", "/layout/array.gds",
                        "/layout/array.svg", "/config.resolved"})
    std::printf("  %s%s\n", r.out.c_str(), p);
  return kOk;
}

int cmd_verify(const Resolved& r, bool fault_given, std::uint64_t fault_seed) {
  for (const char* sub : {"/layout", "/netlist", "/drc", "/lvs"})
    fileio::ensure_dir(r.out + sub);

  // Verification runs on the artifacts on disk; anything missing is
  // regenerated first so `verify` works standalone.
  std::string gds_path = r.out + "/layout/array.gds";
  layout::LayoutDb db;
  if (fileio::exists(gds_path)) {
    db = gdsii::read_file(gds_path);
  } else {
    db = layout::tile_array(r.cfg, r.tmpl);
    gdsii::write_file(db, gds_path);
  }
  std::string sp_path = r.out + "/netlist/array.sp";
  netlist::Netlist reference;
  if (fileio::exists(sp_path)) {
    reference = netlist::parse_spice(fileio::read_text(sp_path));
  } else {
    reference = netlist::build_array(r.cfg);
    fileio::write_text(sp_path, netlist::emit_spice(reference));
  }

  if (fault_given) {
    verify::FaultInfo info;
    db = verify::inject_fault(db, r.tmpl, fault_seed, &info);
    std::printf("fault injected (seed %llu): %s\n",
                static_cast<unsigned long long>(fault_seed), info.description.c_str());
  }

  std::vector<verify::Violation> violations = verify::run_drc(db, r.rules);
  std::string drc_path = r.out + "/drc/drc_report.txt";
  fileio::write_text(drc_path, verify::drc_report_text(violations, r.rules));
  fileio::write_text(r.out + "/drc/violations.csv", verify::drc_report_csv(violations));

  verify::MatchReport lvs = verify::run_lvs(db, r.tmpl, reference);
  std::string lvs_path = r.out + "/lvs/lvs_report.txt";
  fileio::write_text(lvs_path, verify::lvs_report_text(lvs));

  if (!violations.empty()) {
    std::fprintf(stderr, "DRC: %zu violation(s), see %s\n", violations.size(), drc_path.c_str());
    return kDrc;
  }
  std::printf("DRC: clean (%s)\n", drc_path.c_str());
  if (!lvs.match) {
    std::fprintf(stderr, "LVS: mismatch, see %s\n", lvs_path.c_str());
    return kLvs;
  }
  std::printf("LVS: match (%s)\n", lvs_path.c_str());
  return kOk;
}

int cmd_characterize(const Resolved& r) {
  report::CharacterizationReport rep;
  rep.sizes = r.sizes;
  rep.sweep = report::sweep_parasitics(r.sizes, r.rates);
  rep.fits = report::fit_sweep(rep.sweep);

  transient::SettlingStudy study = transient::run_settling_study(r.sizes, r.rates);
  rep.r_switch_ss = study.r_switch_ss;
  for (const transient::SettlingResult& res : study.results) {
    for (transient::Corner c : r.corners)
      if (res.corner == c) rep.settling.push_back(res);
  }
  // Fit the slowest corner that was kept (SS when present).
  std::vector<std::pair<double, double>> pts;
  for (const transient::SettlingResult& res : rep.settling)
    if (res.corner == r.corners.front()) pts.emplace_back(double(res.n_cells), res.settling_s);
  rep.settling_fit = report::fit_exponential(pts);

  std::vector<std::string> paths = report::emit_report(rep, r.out + "/pex");
  write_resolved(r);
  std::printf("calibrated SS switch resistance: %s ohm\n", textio::sci(rep.r_switch_ss).c_str());
  std::printf("settling fit: t(n) = %s * exp(%s * n)\n", textio::sci(rep.settling_fit.a).c_str(),
              textio::sci(rep.settling_fit.k).c_str());
  for (const std::string& p : paths) std::printf("  %s\n", p.c_str());
  return kOk;
}

int cmd_protocol(const Resolved& r, const std::string& script_path) {
  std::string text = fileio::read_text(script_path);
  arch::ProtocolOptions opts = arch::ProtocolOptions::defaults(r.cfg);
  std::vector<arch::OperationPlan> plans = arch::parse_protocol_script(r.cfg, text, opts);

  arch::CellStateMatrix initial =
      arch::CellStateMatrix::uniform(r.cfg.rows, r.cfg.cols, arch::CellState::H);
  std::string trace;
  arch::simulate_protocol(r.cfg, initial, plans, opts, &trace);

  fileio::ensure_dir(r.out + "/protocol");
  std::string trace_path = r.out + "/protocol/trace.txt";
  fileio::write_text(trace_path, trace);
  std::fputs(trace.c_str(), stdout);
  std::printf("trace written to %s\n", trace_path.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rramc: 1T1R memory array compiler"};
  app.require_subcommand(1);
  Cli cli;

  CLI::App* gen = app.add_subcommand("generate", "emit netlists, GDSII layout, and SVG preview");
  add_common(gen, cli);
  CLI::App* ver = app.add_subcommand("verify", "run DRC and LVS on the generated artifacts");
  add_common(ver, cli);
  CLI::Option* fault_opt =
      ver->add_option("--fault-inject", cli.fault_seed, "seed a single geometric fault first");
  CLI::App* cha = app.add_subcommand("characterize", "parasitic sweep, calibration, settling study");
  add_common(cha, cli);
  CLI::App* pro = app.add_subcommand("protocol", "run a write/read script through the array model");
  add_common(pro, cli);
  pro->add_option("script", cli.script_path, "protocol script file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  cli.fault_given = fault_opt->count() > 0;

  Resolved r;
  try {
    r = resolve(cli);
  } catch (const Error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  }

  try {
    if (app.got_subcommand(gen)) return cmd_generate(r);
    if (app.got_subcommand(ver)) return cmd_verify(r, cli.fault_given, cli.fault_seed);
    if (app.got_subcommand(cha)) return cmd_characterize(r);
    return cmd_protocol(r, cli.script_path);
  } catch (const ProtocolScriptError& e) {
    std::fprintf(stderr, "script error: %s\n", e.what());
    return kScript;
  } catch (const CalibrationFailed& e) {
    std::fprintf(stderr, "characterization error: %s\n", e.what());
    return kCharacterize;
  } catch (const NotSettled& e) {
    std::fprintf(stderr, "characterization error: %s\n", e.what());
    return kCharacterize;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kArtifact;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return kUnexpected;
  }
}
