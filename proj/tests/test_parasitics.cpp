#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "rramc/errors.hpp"
#include "rramc/keyval.hpp"
#include "rramc/parasitics.hpp"
#include "testutil.hpp"

using namespace rramc;
using namespace rramc::parasitics;

TEST_CASE("default rates are self-consistent") {
  ParasiticRates r = ParasiticRates::defaults();
  r.validate();
  CHECK(r.c_sel_f_per_cell > r.c_n_f_per_cell);
  CHECK(r.c_n_f_per_cell > r.c_p_f_per_cell);
  CHECK(r.r_n_ohm_per_cell == r.r_p_ohm_per_cell);
  CHECK(r.c_sel_f_per_cell == 5.83e-15);
  CHECK(r.c_n_f_per_cell == 3.31e-15);
  CHECK(r.c_p_f_per_cell == 2.48e-15);
  CHECK(r.r_sel_ohm_per_cell == 1.28);
  CHECK(r.r_n_ohm_per_cell == 0.14);
  CHECK(r.c_periph_f == 5.78e-13);
  CHECK(r.gate_c_f_per_cell == 0.0);
}

TEST_CASE("validate rejects broken rate sets") {
  ParasiticRates r;
  r.c_sel_f_per_cell = 0.0;
  CHECK_THROWS_AS(r.validate(), InvalidParam);

  r = {};
  r.c_p_f_per_cell = r.c_n_f_per_cell;  // violates SEL > N > P ordering
  CHECK_THROWS_AS(r.validate(), InvalidParam);

  r = {};
  r.r_n_ohm_per_cell = 0.15;  // N and P must share a rate
  CHECK_THROWS_AS(r.validate(), InvalidParam);

  r = {};
  r.r_sel_ohm_per_cell = -1.0;
  CHECK_THROWS_AS(r.validate(), InvalidParam);

  r = {};
  r.gate_c_f_per_cell = -1e-18;
  CHECK_THROWS_AS(r.validate(), InvalidParam);
}

TEST_CASE("per-kind rates and linear totals") {
  ParasiticRates r;
  CHECK(cap_rate(r, LineKind::SEL) == r.c_sel_f_per_cell);
  CHECK(cap_rate(r, LineKind::N) == r.c_n_f_per_cell);
  CHECK(cap_rate(r, LineKind::P) == r.c_p_f_per_cell);
  CHECK(res_rate(r, LineKind::SEL) == r.r_sel_ohm_per_cell);
  CHECK(res_rate(r, LineKind::N) == r.r_n_ohm_per_cell);
  CHECK(res_rate(r, LineKind::P) == r.r_p_ohm_per_cell);

  // Gate load only shows up on the select line.
  r.gate_c_f_per_cell = 1e-15;
  CHECK(cap_rate(r, LineKind::SEL) == r.c_sel_f_per_cell + 1e-15);
  CHECK(cap_rate(r, LineKind::N) == r.c_n_f_per_cell);

  for (std::uint32_t n : {1u, 2u, 37u, 128u}) {
    CHECK(line_capacitance(r, LineKind::N, n) == doctest::Approx(r.c_n_f_per_cell * n));
    CHECK(line_resistance(r, LineKind::P, n) == doctest::Approx(r.r_p_ohm_per_cell * n));
  }
  CHECK(line_capacitance(r, LineKind::SEL, 0) == 0.0);
}

TEST_CASE("ladder shape") {
  ParasiticRates r;
  auto segs = ladder(r, LineKind::N, 5);
  REQUIRE(segs.size() == 5);
  for (const auto& s : segs) {
    CHECK(s.ohms == r.r_n_ohm_per_cell);
    CHECK(s.farads == r.c_n_f_per_cell);
  }
  CHECK_THROWS_AS(ladder(r, LineKind::N, 0), InvalidParam);
}

TEST_CASE("elmore delay matches the closed form on uniform ladders") {
  ParasiticRates r;
  for (std::uint32_t n : {1u, 2u, 8u, 128u}) {
    double direct = elmore_delay(ladder(r, LineKind::SEL, n));
    double closed = elmore_delay_uniform(r.r_sel_ohm_per_cell, r.c_sel_f_per_cell, n);
    CHECK(testutil::approx_rel(direct, closed, 1e-12));
  }
  CHECK(elmore_delay_uniform(2.0, 3.0, 4) == doctest::Approx(2.0 * 3.0 * 4 * 5 / 2));
}

TEST_CASE("elmore delay agrees with a quadratic reference on random ladders") {
  // Reference: delay = sum over nodes i of v of the path resistance shared
  // between driver->i and driver->cap, which for a chain is sum_i r_i * C_downstream(i).
  // Compute it the slow O(n^2) way per capacitor instead of via suffix sums.
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> rd(0.01, 10.0);
  std::uniform_real_distribution<double> cd(1e-16, 1e-13);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LadderSegment> segs;
    int n = 1 + int(rng() % 30);
    for (int i = 0; i < n; ++i) segs.push_back({rd(rng), cd(rng)});
    double ref = 0.0;
    for (int j = 0; j < n; ++j) {
      double path_r = 0.0;
      for (int i = 0; i <= j; ++i) path_r += segs[size_t(i)].ohms;
      ref += path_r * segs[size_t(j)].farads;
    }
    CHECK(testutil::approx_rel(elmore_delay(segs), ref, 1e-12));
  }
  CHECK(elmore_delay({}) == 0.0);
}

TEST_CASE("keyval round trip preserves every field") {
  ParasiticRates r;
  r.c_sel_f_per_cell = 6.0e-15;
  r.c_n_f_per_cell = 4.0e-15;
  r.c_p_f_per_cell = 2.0e-15;
  r.r_sel_ohm_per_cell = 1.5;
  r.r_n_ohm_per_cell = 0.25;
  r.r_p_ohm_per_cell = 0.25;
  r.gate_c_f_per_cell = 3.1e-16;
  r.c_periph_f = 1.0e-13;
  ParasiticRates back = rates_from_doc(keyval::parse(serialize(r)));
  CHECK(back == r);
}

TEST_CASE("rates_from_doc applies overrides on top of defaults") {
  keyval::Document doc;
  doc.set("c_periph_f", "1e-12");
  ParasiticRates r = rates_from_doc(doc);
  CHECK(r.c_periph_f == 1e-12);
  CHECK(r.c_sel_f_per_cell == ParasiticRates::defaults().c_sel_f_per_cell);

  // Overrides that violate the invariants are rejected at load time.
  doc.set("c_sel_f_per_cell", "1e-18");
  CHECK_THROWS_AS(rates_from_doc(doc), InvalidParam);
}

TEST_CASE("load_rates reads a file") {
  testutil::TempDir dir;
  std::string path = dir.sub("rates.conf");
  keyval::save_file(keyval::parse("r_sel_ohm_per_cell = 2.5\n"), path);
  ParasiticRates r = load_rates(path);
  CHECK(r.r_sel_ohm_per_cell == 2.5);
  CHECK_THROWS_AS(load_rates(dir.sub("missing.conf")), IoFailure);
}
