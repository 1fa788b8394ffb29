#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "rramc/arch.hpp"
#include "rramc/errors.hpp"

using namespace rramc;
using namespace rramc::arch;

TEST_CASE("derive_geometry splits the address") {
  auto cfg = derive_geometry(128, 128, 8);
  CHECK(cfg.rows == 128);
  CHECK(cfg.cols == 128);
  CHECK(cfg.word_bits == 8);
  CHECK(cfg.row_addr_bits == 7);
  CHECK(cfg.col_sel_bits == 4);
  CHECK(cfg.words_per_row() == 16);
  CHECK(cfg.address_bits() == 11);
  CHECK(cfg.total_bits() == 16384);

  auto tiny = derive_geometry(1, 1, 1);
  CHECK(tiny.row_addr_bits == 0);
  CHECK(tiny.col_sel_bits == 0);
}

TEST_CASE("derive_geometry rejects bad dimensions") {
  CHECK_THROWS_AS(derive_geometry(100, 128, 8), NotPowerOfTwo);
  CHECK_THROWS_AS(derive_geometry(128, 96, 8), NotPowerOfTwo);  // 96/8 = 12
  CHECK_THROWS_AS(derive_geometry(0, 8, 1), InvalidParam);
  CHECK_THROWS_AS(derive_geometry(8, 0, 1), InvalidParam);
  CHECK_THROWS_AS(derive_geometry(8, 8, 0), InvalidParam);
  CHECK_THROWS_AS(derive_geometry(8, 8, 3), InvalidParam);     // does not divide
  CHECK_THROWS_AS(derive_geometry(8, 8, 16), InvalidParam);    // wider than the row
  CHECK_THROWS_AS(derive_geometry(131072, 8, 1), InvalidParam);
  // The read voltage must stay clear of the disturb bound.
  CHECK_THROWS_AS(derive_geometry(8, 8, 1, 1.8, 0.5), InvalidParam);
  CHECK_THROWS_AS(derive_geometry(8, 8, 1, 0.0, 0.2), InvalidParam);
}

TEST_CASE("flat addresses are row-major over word slots") {
  auto cfg = derive_geometry(8, 8, 2);  // 4 words per row
  CHECK(to_flat(cfg, {0, 0}) == 0);
  CHECK(to_flat(cfg, {0, 3}) == 3);
  CHECK(to_flat(cfg, {1, 0}) == 4);
  CHECK(to_flat(cfg, {7, 3}) == 31);
  for (std::uint32_t flat = 0; flat < 32; ++flat) {
    Address a = from_flat(cfg, flat);
    CHECK(to_flat(cfg, a) == flat);
  }
  CHECK_THROWS_AS(from_flat(cfg, 32), InvalidParam);
  CHECK_THROWS_AS(to_flat(cfg, {8, 0}), InvalidParam);
  CHECK_THROWS_AS(to_flat(cfg, {0, 4}), InvalidParam);
}

TEST_CASE("decode_row is one-hot") {
  auto cfg = derive_geometry(16, 4, 1);
  for (std::uint32_t r = 0; r < 16; ++r) {
    auto sel = decode_row(cfg, r);
    REQUIRE(sel.size() == 16);
    int hot = 0;
    for (std::uint32_t i = 0; i < 16; ++i) {
      if (sel[i]) {
        ++hot;
        CHECK(i == r);
      }
    }
    CHECK(hot == 1);
  }
  CHECK_THROWS_AS(decode_row(cfg, 16), InvalidParam);
}

TEST_CASE("word columns are strided by the word count") {
  auto cfg = derive_geometry(4, 16, 4);  // 4 words, bit k at column 4k + w
  auto cols = select_word_columns(cfg, 1);
  REQUIRE(cols.size() == 4);
  CHECK(cols[0] == 1);
  CHECK(cols[1] == 5);
  CHECK(cols[2] == 9);
  CHECK(cols[3] == 13);
  CHECK_THROWS_AS(select_word_columns(cfg, 4), InvalidParam);
}

TEST_CASE("write plan drives every line once at t=0") {
  auto cfg = derive_geometry(4, 8, 2);
  auto opts = ProtocolOptions::defaults(cfg);
  auto plan = plan_write(cfg, {2, 1}, 0b10, opts);
  CHECK(plan.kind == OpKind::Write);
  CHECK(plan.duration == opts.t_write);
  REQUIRE(plan.events.size() == 4 + 8 + 8);

  std::map<std::pair<int, std::uint32_t>, double> drive;
  for (const auto& e : plan.events) {
    CHECK(e.time == 0.0);
    auto key = std::make_pair(int(e.line.kind), e.line.index);
    CHECK(!drive.count(key));
    drive[key] = e.voltage;
  }
  // Row 2 selected, others off.
  for (std::uint32_t r = 0; r < 4; ++r)
    CHECK(drive[{int(LineKind::SEL), r}] == (r == 2 ? cfg.vdd : 0.0));
  // Data 0b10 at word 1 sits in columns 1 (bit 0) and 5 (bit 1). A 0 bit
  // programs H (N high), a 1 bit programs L (P high).
  CHECK(drive[{int(LineKind::P), 1}] == 0.0);
  CHECK(drive[{int(LineKind::N), 1}] == cfg.vdd);
  CHECK(drive[{int(LineKind::P), 5}] == cfg.vdd);
  CHECK(drive[{int(LineKind::N), 5}] == 0.0);
  // Unselected columns are grounded on both rails so no cell sees a write voltage.
  for (std::uint32_t c : {0u, 2u, 3u, 4u, 6u, 7u}) {
    double vp = drive[{int(LineKind::P), c}];
    double vn = drive[{int(LineKind::N), c}];
    CHECK(std::abs(vp - vn) < opts.v_write_threshold);
  }
}

TEST_CASE("read plan biases every column at the read voltage") {
  auto cfg = derive_geometry(4, 8, 2);
  auto opts = ProtocolOptions::defaults(cfg);
  auto plan = plan_read(cfg, {3, 0}, opts);
  CHECK(plan.kind == OpKind::Read);
  // Word 0 of a 4-words-per-row layout sits in columns 0 and 4; only those
  // P lines carry the read voltage, everything else stays grounded.
  for (const auto& e : plan.events) {
    if (e.line.kind == LineKind::P)
      CHECK(e.voltage == ((e.line.index == 0 || e.line.index == 4) ? cfg.v_read : 0.0));
    if (e.line.kind == LineKind::N) CHECK(e.voltage == 0.0);
    if (e.line.kind == LineKind::SEL)
      CHECK(e.voltage == (e.line.index == 3 ? cfg.vdd : 0.0));
    CHECK(std::abs(e.voltage) < 1.9);
  }
}

TEST_CASE("write then read recovers the word") {
  auto cfg = derive_geometry(8, 8, 2);
  auto opts = ProtocolOptions::defaults(cfg);
  auto st = CellStateMatrix::uniform(8, 8, CellState::H);
  std::vector<OperationPlan> plans;
  plans.push_back(plan_write(cfg, {5, 2}, 0b01, opts));
  plans.push_back(plan_read(cfg, {5, 2}, opts));
  auto out = simulate_protocol(cfg, st, plans, opts);
  REQUIRE(out.reads.size() == 1);
  CHECK(out.reads[0] == 0b01);
  // Only the two cells of word (5,2) may have changed.
  auto cols = select_word_columns(cfg, 2);
  for (std::uint32_t r = 0; r < 8; ++r)
    for (std::uint32_t c = 0; c < 8; ++c) {
      bool in_word = (r == 5) && (c == cols[0] || c == cols[1]);
      if (!in_word) CHECK(out.final_state.at(r, c) == CellState::H);
    }
  CHECK(out.final_state.at(5, cols[0]) == CellState::L);
  CHECK(out.final_state.at(5, cols[1]) == CellState::H);
}

TEST_CASE("reads do not change state or digest") {
  auto cfg = derive_geometry(4, 4, 1);
  auto opts = ProtocolOptions::defaults(cfg);
  auto st = CellStateMatrix::uniform(4, 4, CellState::H);
  st.at(2, 3) = CellState::L;
  auto before = state_digest(st);
  std::vector<OperationPlan> plans;
  for (std::uint32_t f = 0; f < 16; ++f) plans.push_back(plan_read(cfg, from_flat(cfg, f), opts));
  auto out = simulate_protocol(cfg, st, plans, opts);
  CHECK(state_digest(out.final_state) == before);
  CHECK(out.final_state == st);
}

TEST_CASE("hand-built plans with illegal drive are rejected") {
  auto cfg = derive_geometry(4, 4, 1);
  auto opts = ProtocolOptions::defaults(cfg);
  auto st = CellStateMatrix::uniform(4, 4, CellState::H);

  // Two selected rows violate the one-hot invariant.
  auto plan = plan_write(cfg, {0, 0}, 1, opts);
  for (auto& e : plan.events)
    if (e.line.kind == LineKind::SEL && e.line.index == 1) e.voltage = cfg.vdd;
  CHECK_THROWS_AS(simulate_protocol(cfg, st, {plan}, opts), InvalidParam);

  // A read that forward-biases a column at the disturb bound is an error.
  auto read = plan_read(cfg, {0, 0}, opts);
  for (auto& e : read.events)
    if (e.line.kind == LineKind::P && e.line.index == 2) e.voltage = 0.5;
  CHECK_THROWS_AS(simulate_protocol(cfg, st, {read}, opts), DisturbViolation);
}

TEST_CASE("random write sequences match a reference model") {
  auto cfg = derive_geometry(8, 16, 4);
  auto opts = ProtocolOptions::defaults(cfg);
  std::mt19937_64 rng(1234);
  std::map<std::uint32_t, std::uint32_t> model;  // flat address -> value
  auto st = CellStateMatrix::uniform(8, 16, CellState::H);
  std::vector<OperationPlan> plans;
  std::uint32_t flats = cfg.rows * cfg.words_per_row();
  for (int i = 0; i < 300; ++i) {
    std::uint32_t f = std::uint32_t(rng() % flats);
    std::uint32_t v = std::uint32_t(rng() & 0xF);
    model[f] = v;
    plans.push_back(plan_write(cfg, from_flat(cfg, f), v, opts));
  }
  for (std::uint32_t f = 0; f < flats; ++f) plans.push_back(plan_read(cfg, from_flat(cfg, f), opts));
  auto out = simulate_protocol(cfg, st, plans, opts);
  REQUIRE(out.reads.size() == flats);
  for (std::uint32_t f = 0; f < flats; ++f) {
    std::uint32_t expect = model.count(f) ? model[f] : 0;  // H everywhere reads 0
    CHECK(out.reads[f] == expect);
  }
}

TEST_CASE("script parsing") {
  auto cfg = derive_geometry(8, 8, 8);  // one word per row, flat = row
  auto opts = ProtocolOptions::defaults(cfg);
  auto plans = parse_protocol_script(cfg, "# demo\nwrite 0 0xA5\n\nread 0\nwrite 7 255\n", opts);
  REQUIRE(plans.size() == 3);
  CHECK(plans[0].kind == OpKind::Write);
  CHECK(plans[0].data == 0xA5);
  CHECK(plans[1].kind == OpKind::Read);
  CHECK(plans[2].target.row == 7);
  CHECK(plans[2].data == 255);

  auto check_line = [&](const char* text, std::size_t line) {
    try {
      parse_protocol_script(cfg, text, opts);
      FAIL("expected ProtocolScriptError");
    } catch (const ProtocolScriptError& e) {
      CHECK(e.line == line);
    }
  };
  check_line("write 0 1\nfrobnicate\n", 2);
  check_line("write 0\n", 1);
  check_line("read 0 0\n", 1);
  check_line("write 0 256\n", 1);   // over 2^word_bits - 1
  check_line("read 8\n", 1);        // address out of range
  check_line("write zz 1\n", 1);
}
