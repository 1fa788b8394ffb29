#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rramc/lines.hpp"

namespace rramc::arch {

inline constexpr double kDefaultVdd = 1.8;
inline constexpr double kDefaultVRead = 0.2;
inline constexpr double kReadDisturbBound = 0.5;

// Array organization. An array holds rows x cols cells; each row stores
// words_per_row() words of word_bits bits. Bit k of a word at word slot w
// sits in column k * words_per_row() + w, so the column mux for bit k is a
// contiguous group of words_per_row() columns.
struct ArrayConfig {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t word_bits = 0;
  std::uint32_t row_addr_bits = 0;  // log2(rows)
  std::uint32_t col_sel_bits = 0;   // log2(cols / word_bits)
  double vdd = kDefaultVdd;
  double v_read = kDefaultVRead;

  std::uint32_t words_per_row() const { return 1u << col_sel_bits; }
  std::uint64_t total_bits() const { return std::uint64_t(rows) * cols; }
  std::uint32_t address_bits() const { return row_addr_bits + col_sel_bits; }
};

// Validates dimensions and derives the address split.
// rows and cols/word_bits must be powers of two; word_bits must divide cols.
ArrayConfig derive_geometry(std::uint32_t rows, std::uint32_t cols, std::uint32_t word_bits,
                            double vdd = kDefaultVdd, double v_read = kDefaultVRead);

struct Address {
  std::uint32_t row = 0;
  std::uint32_t word = 0;  // word slot within the row, < words_per_row()
  friend bool operator==(const Address&, const Address&) = default;
};

std::uint32_t to_flat(const ArrayConfig& cfg, const Address& a);
Address from_flat(const ArrayConfig& cfg, std::uint32_t flat);
void validate_address(const ArrayConfig& cfg, const Address& a);

// One-hot row decode; exactly one element is true.
std::vector<bool> decode_row(const ArrayConfig& cfg, std::uint32_t row);

// Columns holding bits 0..word_bits-1 of the given word slot, ascending.
std::vector<std::uint32_t> select_word_columns(const ArrayConfig& cfg, std::uint32_t word);

// Memristor state: H is the high-resistance state, L low-resistance.
// A stored 1 bit corresponds to state L.
enum class CellState : std::uint8_t { H = 0, L = 1 };

struct CellStateMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<CellState> states;  // row-major

  static CellStateMatrix uniform(std::uint32_t rows, std::uint32_t cols, CellState s);
  CellState& at(std::uint32_t r, std::uint32_t c);
  CellState at(std::uint32_t r, std::uint32_t c) const;
  friend bool operator==(const CellStateMatrix&, const CellStateMatrix&) = default;
};

// Order-sensitive FNV-1a digest over dimensions and cell states.
std::uint64_t state_digest(const CellStateMatrix& m);

struct ProtocolOptions {
  double t_write = 10e-9;
  double t_read = 10e-9;
  double v_write_threshold;   // |VP-VN| at or above this flips a selected cell
  double read_disturb_bound;  // |VP-VN| at or above this during a read is an error

  static ProtocolOptions defaults(const ArrayConfig& cfg);
};

enum class OpKind : std::uint8_t { Read, Write };

struct PlanEvent {
  double time = 0.0;
  LineId line;
  double voltage = 0.0;
};

// Complete drive plan for one operation: every line of the array receives an
// event at t=0, so a plan fully determines the drive state with no carryover.
struct OperationPlan {
  OpKind kind{OpKind::Read};
  Address target;
  std::uint32_t data = 0;  // write payload, < 2^word_bits
  double duration = 0.0;
  std::vector<PlanEvent> events;
};

OperationPlan plan_read(const ArrayConfig& cfg, const Address& a);
OperationPlan plan_read(const ArrayConfig& cfg, const Address& a, const ProtocolOptions& opts);
OperationPlan plan_write(const ArrayConfig& cfg, const Address& a, std::uint32_t data);
OperationPlan plan_write(const ArrayConfig& cfg, const Address& a, std::uint32_t data,
                         const ProtocolOptions& opts);

struct ProtocolResult {
  CellStateMatrix final_state;
  std::vector<std::uint32_t> reads;  // one entry per read plan, in order
};

// Behavioral simulation of a plan sequence against an initial state.
// Checks the one-row-selected invariant and the read disturb bound.
// If trace_out is non-null a deterministic text trace is appended to it.
ProtocolResult simulate_protocol(const ArrayConfig& cfg, const CellStateMatrix& initial,
                                 const std::vector<OperationPlan>& plans,
                                 const ProtocolOptions& opts, std::string* trace_out = nullptr);

// Script grammar, one op per line ('#' comments and blank lines ignored):
//   write <addr> <value>
//   read <addr>
// Addresses are flat ((row << col_sel_bits) | word); numbers accept decimal
// or 0x-prefixed hex.
std::vector<OperationPlan> parse_protocol_script(const ArrayConfig& cfg, std::string_view text,
                                                 const ProtocolOptions& opts);

}  // namespace rramc::arch
