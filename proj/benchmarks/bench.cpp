// Microbenchmarks for the hot paths: tiling, flattening, DRC, netlist
// emission, stream round trips, extraction/LVS, and the transient solver.
#include <benchmark/benchmark.h>

#include <cstdint>

#include "rramc/arch.hpp"
#include "rramc/gdsii.hpp"
#include "rramc/layout.hpp"
#include "rramc/netlist.hpp"
#include "rramc/parasitics.hpp"
#include "rramc/transient.hpp"
#include "rramc/verify.hpp"

using namespace rramc;

namespace {

arch::ArrayConfig cfg(std::int64_t rows, std::int64_t cols) {
  return arch::derive_geometry(std::uint32_t(rows), std::uint32_t(cols), 8);
}

void BM_TileArray(benchmark::State& state) {
  auto c = cfg(state.range(0), state.range(0));
  auto t = layout::default_template();
  for (auto _ : state) benchmark::DoNotOptimize(layout::tile_array(c, t));
}
BENCHMARK(BM_TileArray)->Arg(32)->Arg(128);

void BM_FlattenRects(benchmark::State& state) {
  auto db = layout::tile_array(cfg(state.range(0), state.range(0)), layout::default_template());
  for (auto _ : state) benchmark::DoNotOptimize(layout::flatten_rects(db));
}
BENCHMARK(BM_FlattenRects)->Arg(32)->Arg(128);

void BM_Drc(benchmark::State& state) {
  auto db = layout::tile_array(cfg(state.range(0), state.range(0)), layout::default_template());
  auto deck = verify::RuleDeck::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(verify::run_drc(db, deck));
}
BENCHMARK(BM_Drc)->Arg(16)->Arg(64);

void BM_EmitSpice(benchmark::State& state) {
  auto nl = netlist::build_array(cfg(state.range(0), state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(netlist::emit_spice(nl));
}
BENCHMARK(BM_EmitSpice)->Arg(32)->Arg(128);

void BM_FlattenNetlist(benchmark::State& state) {
  auto nl = netlist::build_array(cfg(state.range(0), state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(netlist::flatten(nl));
}
BENCHMARK(BM_FlattenNetlist)->Arg(32)->Arg(128);

void BM_GdsRoundTrip(benchmark::State& state) {
  auto db = layout::tile_array(cfg(state.range(0), state.range(0)), layout::default_template());
  for (auto _ : state) {
    auto bytes = gdsii::emit(db);
    benchmark::DoNotOptimize(gdsii::parse(bytes));
  }
}
BENCHMARK(BM_GdsRoundTrip)->Arg(32)->Arg(128);

void BM_ExtractLvs(benchmark::State& state) {
  auto c = cfg(state.range(0), state.range(0));
  auto t = layout::default_template();
  auto db = layout::tile_array(c, t);
  auto ref = netlist::build_array(c);
  for (auto _ : state) benchmark::DoNotOptimize(verify::run_lvs(db, t, ref));
}
BENCHMARK(BM_ExtractLvs)->Arg(16)->Arg(64);

void BM_MeasureSettling(benchmark::State& state) {
  parasitics::ParasiticRates rates;
  auto corners = transient::make_corners(200.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        transient::measure_settling(std::uint32_t(state.range(0)), rates, corners[0]));
}
BENCHMARK(BM_MeasureSettling)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
