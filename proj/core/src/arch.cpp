#include "rramc/arch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "rramc/errors.hpp"
#include "rramc/textio.hpp"

namespace rramc::arch {

namespace {

bool is_pow2(std::uint32_t x) { return x != 0 && (x & (x - 1)) == 0; }

std::uint32_t log2_exact(std::uint32_t x) {
  std::uint32_t b = 0;
  while ((1u << b) < x) ++b;
  return b;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

ArrayConfig derive_geometry(std::uint32_t rows, std::uint32_t cols, std::uint32_t word_bits,
                            double vdd, double v_read) {
  if (rows == 0 || rows > 65536) throw InvalidParam("rows must be in [1, 65536]");
  if (cols == 0 || cols > 65536) throw InvalidParam("cols must be in [1, 65536]");
  if (!is_pow2(rows)) throw NotPowerOfTwo("rows must be a power of two");
  if (word_bits == 0 || word_bits > 32) throw InvalidParam("word_bits must be in [1, 32]");
  if (cols % word_bits != 0) throw InvalidParam("word_bits must divide cols");
  std::uint32_t words = cols / word_bits;
  if (!is_pow2(words)) throw NotPowerOfTwo("cols / word_bits must be a power of two");
  if (!(vdd > 0.0) || !(vdd < 100.0)) throw InvalidParam("vdd must be in (0, 100) volts");
  if (!(v_read > 0.0)) throw InvalidParam("v_read must be positive");
  if (v_read >= kReadDisturbBound)
    throw InvalidParam("v_read must stay below the read disturb bound of 0.5 V");
  if (v_read >= vdd) throw InvalidParam("v_read must be below vdd");

  ArrayConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.word_bits = word_bits;
  cfg.row_addr_bits = log2_exact(rows);
  cfg.col_sel_bits = log2_exact(words);
  cfg.vdd = vdd;
  cfg.v_read = v_read;
  return cfg;
}

void validate_address(const ArrayConfig& cfg, const Address& a) {
  if (a.row >= cfg.rows) throw InvalidParam("row address out of range");
  if (a.word >= cfg.words_per_row()) throw InvalidParam("word address out of range");
}

std::uint32_t to_flat(const ArrayConfig& cfg, const Address& a) {
  validate_address(cfg, a);
  return (a.row << cfg.col_sel_bits) | a.word;
}

Address from_flat(const ArrayConfig& cfg, std::uint32_t flat) {
  Address a;
  a.row = flat >> cfg.col_sel_bits;
  a.word = flat & (cfg.words_per_row() - 1);
  validate_address(cfg, a);
  return a;
}

std::vector<bool> decode_row(const ArrayConfig& cfg, std::uint32_t row) {
  if (row >= cfg.rows) throw InvalidParam("row address out of range");
  std::vector<bool> onehot(cfg.rows, false);
  onehot[row] = true;
  return onehot;
}

std::vector<std::uint32_t> select_word_columns(const ArrayConfig& cfg, std::uint32_t word) {
  if (word >= cfg.words_per_row()) throw InvalidParam("word address out of range");
  std::vector<std::uint32_t> cols(cfg.word_bits);
  for (std::uint32_t k = 0; k < cfg.word_bits; ++k)
    cols[k] = k * cfg.words_per_row() + word;
  return cols;
}

CellStateMatrix CellStateMatrix::uniform(std::uint32_t rows, std::uint32_t cols, CellState s) {
  CellStateMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.states.assign(std::size_t(rows) * cols, s);
  return m;
}

CellState& CellStateMatrix::at(std::uint32_t r, std::uint32_t c) {
  if (r >= rows || c >= cols) throw InvalidParam("cell index out of range");
  return states[std::size_t(r) * cols + c];
}

CellState CellStateMatrix::at(std::uint32_t r, std::uint32_t c) const {
  if (r >= rows || c >= cols) throw InvalidParam("cell index out of range");
  return states[std::size_t(r) * cols + c];
}

std::uint64_t state_digest(const CellStateMatrix& m) {
  std::uint64_t h = 14695981039346656037ull;
  std::uint32_t dims[2] = {m.rows, m.cols};
  h = fnv1a(h, dims, sizeof dims);
  for (CellState s : m.states) {
    unsigned char b = static_cast<unsigned char>(s);
    h = fnv1a(h, &b, 1);
  }
  return h;
}

ProtocolOptions ProtocolOptions::defaults(const ArrayConfig& cfg) {
  ProtocolOptions o;
  o.v_write_threshold = 0.9 * cfg.vdd;
  o.read_disturb_bound = kReadDisturbBound;
  return o;
}

namespace {

void validate_options(const ProtocolOptions& o) {
  if (!(o.t_write > 0.0) || !(o.t_read > 0.0)) throw InvalidParam("pulse durations must be positive");
  if (!(o.v_write_threshold > 0.0)) throw InvalidParam("v_write_threshold must be positive");
  if (!(o.read_disturb_bound > 0.0)) throw InvalidParam("read_disturb_bound must be positive");
  if (o.read_disturb_bound >= o.v_write_threshold)
    throw InvalidParam("read_disturb_bound must be below v_write_threshold");
}

// Emits a t=0 event for every line so a plan carries its complete drive state.
void push_full_drive(const ArrayConfig& cfg, OperationPlan& plan,
                     const std::vector<double>& sel, const std::vector<double>& p,
                     const std::vector<double>& n) {
  for (std::uint32_t i = 0; i < cfg.rows; ++i)
    plan.events.push_back({0.0, {LineKind::SEL, i}, sel[i]});
  for (std::uint32_t j = 0; j < cfg.cols; ++j)
    plan.events.push_back({0.0, {LineKind::P, j}, p[j]});
  for (std::uint32_t j = 0; j < cfg.cols; ++j)
    plan.events.push_back({0.0, {LineKind::N, j}, n[j]});
}

}  // namespace

OperationPlan plan_read(const ArrayConfig& cfg, const Address& a) {
  return plan_read(cfg, a, ProtocolOptions::defaults(cfg));
}

OperationPlan plan_read(const ArrayConfig& cfg, const Address& a, const ProtocolOptions& opts) {
  validate_address(cfg, a);
  validate_options(opts);
  OperationPlan plan;
  plan.kind = OpKind::Read;
  plan.target = a;
  plan.duration = opts.t_read;
  std::vector<double> sel(cfg.rows, 0.0), p(cfg.cols, 0.0), n(cfg.cols, 0.0);
  sel[a.row] = cfg.vdd;
  for (std::uint32_t c : select_word_columns(cfg, a.word)) p[c] = cfg.v_read;
  push_full_drive(cfg, plan, sel, p, n);
  return plan;
}

OperationPlan plan_write(const ArrayConfig& cfg, const Address& a, std::uint32_t data) {
  return plan_write(cfg, a, data, ProtocolOptions::defaults(cfg));
}

OperationPlan plan_write(const ArrayConfig& cfg, const Address& a, std::uint32_t data,
                         const ProtocolOptions& opts) {
  validate_address(cfg, a);
  validate_options(opts);
  if (cfg.word_bits < 32 && data >= (1u << cfg.word_bits))
    throw InvalidParam("write data exceeds word width");
  OperationPlan plan;
  plan.kind = OpKind::Write;
  plan.target = a;
  plan.data = data;
  plan.duration = opts.t_write;
  std::vector<double> sel(cfg.rows, 0.0), p(cfg.cols, 0.0), n(cfg.cols, 0.0);
  sel[a.row] = cfg.vdd;
  auto cols = select_word_columns(cfg, a.word);
  for (std::uint32_t k = 0; k < cfg.word_bits; ++k) {
    bool bit = (data >> k) & 1u;
    // A 1 bit programs the low-resistance state: current from P to N.
    // A 0 bit programs the high-resistance state: current from N to P.
    if (bit) {
      p[cols[k]] = cfg.vdd;
      n[cols[k]] = 0.0;
    } else {
      p[cols[k]] = 0.0;
      n[cols[k]] = cfg.vdd;
    }
  }
  push_full_drive(cfg, plan, sel, p, n);
  return plan;
}

namespace {

struct DriveState {
  std::vector<double> sel, p, n;
};

void apply_event(const ArrayConfig& cfg, DriveState& d, const PlanEvent& e) {
  switch (e.line.kind) {
    case LineKind::SEL:
      if (e.line.index >= cfg.rows) throw InvalidParam("event SEL index out of range");
      d.sel[e.line.index] = e.voltage;
      break;
    case LineKind::P:
      if (e.line.index >= cfg.cols) throw InvalidParam("event P index out of range");
      d.p[e.line.index] = e.voltage;
      break;
    case LineKind::N:
      if (e.line.index >= cfg.cols) throw InvalidParam("event N index out of range");
      d.n[e.line.index] = e.voltage;
      break;
  }
}

// Returns the selected row, or -1 when no row is selected.
// More than one selected row violates the decode invariant.
int selected_row(const ArrayConfig& cfg, const DriveState& d) {
  int row = -1;
  for (std::uint32_t i = 0; i < cfg.rows; ++i) {
    if (d.sel[i] >= 0.5 * cfg.vdd) {
      if (row >= 0) throw InvalidParam("multiple rows selected simultaneously");
      row = int(i);
    }
  }
  return row;
}

}  // namespace

ProtocolResult simulate_protocol(const ArrayConfig& cfg, const CellStateMatrix& initial,
                                 const std::vector<OperationPlan>& plans,
                                 const ProtocolOptions& opts, std::string* trace_out) {
  validate_options(opts);
  if (initial.rows != cfg.rows || initial.cols != cfg.cols)
    throw InvalidParam("initial state dimensions disagree with array config");

  ProtocolResult result;
  result.final_state = initial;
  int pad_r = textio::index_width(cfg.rows);
  int pad_c = textio::index_width(cfg.cols);

  for (std::size_t op_idx = 0; op_idx < plans.size(); ++op_idx) {
    const OperationPlan& plan = plans[op_idx];
    validate_address(cfg, plan.target);
    if (trace_out) {
      *trace_out += "op " + std::to_string(op_idx) + ' ';
      *trace_out += (plan.kind == OpKind::Read) ? "read" : "write";
      *trace_out += " row=" + std::to_string(plan.target.row) +
                    " word=" + std::to_string(plan.target.word);
      if (plan.kind == OpKind::Write) {
        char hex[16];
        std::snprintf(hex, sizeof hex, "0x%X", plan.data);
        *trace_out += std::string(" data=") + hex;
      }
      *trace_out += " duration=" + textio::sci(plan.duration) + '\n';
    }

    DriveState d;
    d.sel.assign(cfg.rows, 0.0);
    d.p.assign(cfg.cols, 0.0);
    d.n.assign(cfg.cols, 0.0);

    std::vector<double> times;
    times.reserve(plan.events.size());
    for (const PlanEvent& e : plan.events) times.push_back(e.time);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    int row = -1;
    for (double t : times) {
      for (const PlanEvent& e : plan.events) {
        if (e.time == t) {
          apply_event(cfg, d, e);
          if (trace_out) {
            *trace_out += "  drive t=" + textio::sci(t) + ' ' +
                          line_name(e.line.kind, e.line.index,
                                    e.line.kind == LineKind::SEL ? pad_r : pad_c) +
                          ' ' + textio::sci(e.voltage) + '\n';
          }
        }
      }
      row = selected_row(cfg, d);
      if (row < 0) continue;
      for (std::uint32_t j = 0; j < cfg.cols; ++j) {
        double dv = d.p[j] - d.n[j];
        if (plan.kind == OpKind::Write) {
          if (std::abs(dv) >= opts.v_write_threshold) {
            CellState next = (d.n[j] > d.p[j]) ? CellState::H : CellState::L;
            if (result.final_state.at(std::uint32_t(row), j) != next) {
              result.final_state.at(std::uint32_t(row), j) = next;
              if (trace_out) {
                *trace_out += "  flip cell[" + std::to_string(row) + "][" + std::to_string(j) +
                              "] -> " + (next == CellState::H ? "H" : "L") + '\n';
              }
            }
          }
        } else {
          if (std::abs(dv) >= opts.read_disturb_bound)
            throw DisturbViolation("read bias " + textio::sci(std::abs(dv)) +
                                   " V reaches the disturb bound on column " + std::to_string(j));
        }
      }
    }

    if (plan.kind == OpKind::Read) {
      if (row < 0) throw InvalidParam("read plan never selects a row");
      std::uint32_t value = 0;
      auto cols = select_word_columns(cfg, plan.target.word);
      for (std::uint32_t k = 0; k < cfg.word_bits; ++k) {
        if (result.final_state.at(std::uint32_t(row), cols[k]) == CellState::L)
          value |= (1u << k);
      }
      result.reads.push_back(value);
      if (trace_out) {
        char hex[16];
        std::snprintf(hex, sizeof hex, "0x%X", value);
        *trace_out += std::string("  result ") + hex + '\n';
      }
    }
  }

  if (trace_out) {
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(state_digest(result.final_state)));
    *trace_out += std::string("final_digest ") + hex + '\n';
  }
  return result;
}

namespace {

std::uint32_t parse_value(std::string_view tok, std::size_t line_no) {
  std::string buf(tok);
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(buf.c_str(), &end, 0);
  if (end != buf.c_str() + buf.size() || errno == ERANGE || v > 0xffffffffull)
    throw ProtocolScriptError("bad value '" + buf + "'", line_no);
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<OperationPlan> parse_protocol_script(const ArrayConfig& cfg, std::string_view text,
                                                 const ProtocolOptions& opts) {
  std::vector<OperationPlan> plans;
  std::size_t line_no = 0;
  for (std::string_view raw : textio::split(text, '\n')) {
    ++line_no;
    std::string_view line = textio::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto toks = textio::split_ws(line);
    try {
      if (toks[0] == "write") {
        if (toks.size() != 3)
          throw ProtocolScriptError("write expects: write <addr> <value>", line_no);
        Address a = from_flat(cfg, parse_value(toks[1], line_no));
        plans.push_back(plan_write(cfg, a, parse_value(toks[2], line_no), opts));
      } else if (toks[0] == "read") {
        if (toks.size() != 2) throw ProtocolScriptError("read expects: read <addr>", line_no);
        Address a = from_flat(cfg, parse_value(toks[1], line_no));
        plans.push_back(plan_read(cfg, a, opts));
      } else {
        throw ProtocolScriptError("unknown directive '" + std::string(toks[0]) + "'", line_no);
      }
    } catch (const ProtocolScriptError&) {
      throw;
    } catch (const Error& e) {
      throw ProtocolScriptError(e.what(), line_no);
    }
  }
  return plans;
}

}  // namespace rramc::arch
