#include <gtest/gtest.h>

#include <algorithm>

#include "alp/sim.hpp"
#include "alp/synth.hpp"

using namespace alp;

namespace {

constexpr Tick C = kTicksPerCycle;

DynamicTrace one_load(Addr a) {
    DynamicTrace t;
    t.records.push_back({0, 1, 0x10, InstrKind::load, a});
    return t;
}

DynamicTrace trace_of(const Workload& w) { return unroll_trace(w.program, w.params, w.seed); }

StaticPlacement split(Side producer, Side consumer, TransferPlan plan = {}) {
    return StaticPlacement({{1, producer}, {2, consumer}}, std::move(plan));
}

}  // namespace

TEST(Sim, EmptyTrace) {
    StaticPlacement p({{1, Side::host}});
    const auto r = simulate(DynamicTrace{}, p, MachineConfig{});
    EXPECT_EQ(r.total_ticks, 0u);
    EXPECT_EQ(r.instructions, 0u);
    EXPECT_EQ(r.energy.total(), 0u);
}

TEST(Sim, SingleHostMissLatency) {
    MachineConfig cfg;
    StaticPlacement p({{1, Side::host}});
    const auto r = simulate(one_load(0x1000), p, cfg);
    EXPECT_EQ(r.total_ticks, cfg.ticks_per_instr() + 104 * C);
    EXPECT_EQ(r.dram_reads, 1u);
    EXPECT_EQ(r.segments.at(1).llc_misses, 1u);
}

TEST(Sim, SingleNdpMissLatency) {
    MachineConfig cfg;
    StaticPlacement p({{1, Side::ndp}});
    const auto r = simulate(one_load(0x1000), p, cfg);
    // translation + L1 + channel slot + array access
    EXPECT_EQ(r.total_ticks, cfg.ticks_per_instr() + (1 + 4) * C + cfg.ndp_line_ticks() + 46 * C);
}

TEST(Sim, PlacementGapThrows) {
    StaticPlacement p({{2, Side::host}});
    EXPECT_THROW(simulate(one_load(0), p, MachineConfig{}), PlacementGap);
}

TEST(Sim, Deterministic) {
    const auto w = gen_synth_workload(2048, 2, 7);
    const auto t = trace_of(w);
    auto a = split(Side::ndp, Side::host, {{0x400014, {1, 2, true}}});
    auto b = split(Side::ndp, Side::host, {{0x400014, {1, 2, true}}});
    MachineConfig cfg;
    EXPECT_EQ(simulate(t, a, cfg), simulate(t, b, cfg));
}

TEST(Sim, EnergyLedgerSumsComponents) {
    const auto w = gen_synth_workload(1024, 2, 3);
    auto p = split(Side::ndp, Side::host);
    const auto r = simulate(trace_of(w), p, MachineConfig{});
    const auto& e = r.energy;
    EXPECT_EQ(e.total(), e.l1_host + e.l2 + e.llc + e.l1_ndp + e.dram_internal + e.logic_layer + e.serdes);
    EXPECT_GT(e.serdes, 0u);
}

TEST(Sim, PushesHideMovement) {
    const auto w = gen_synth_workload(4096, 4, 11);
    const auto t = trace_of(w);
    MachineConfig cfg;
    auto plain = split(Side::ndp, Side::host);
    auto pushed = split(Side::ndp, Side::host, {{0x400014, {1, 2, true}}});
    const auto a = simulate(t, plain, cfg);
    const auto b = simulate(t, pushed, cfg);
    EXPECT_EQ(a.transfers.lines_moved, 0u);
    EXPECT_GT(b.transfers.lines_moved, 0u);
    EXPECT_GT(b.transfers.hidden_ticks, 0u);
    EXPECT_LT(b.crossings, a.crossings);
    EXPECT_LT(b.total_ticks, a.total_ticks);
}

TEST(Sim, SameSidePlanMovesNothing) {
    const auto w = gen_synth_workload(1024, 2, 11);
    auto p = split(Side::host, Side::host, {{0x400014, {1, 2, true}}});
    const auto r = simulate(trace_of(w), p, MachineConfig{});
    EXPECT_EQ(r.transfers.lines_moved, 0u);
    EXPECT_EQ(r.handoffs, 0u);
}

TEST(Sim, FreeCrossingsNeverSlower) {
    const auto w = gen_synth_workload(2048, 4, 5);
    const auto t = trace_of(w);
    MachineConfig cfg;
    auto p = split(Side::ndp, Side::host);
    const auto real = simulate(t, p, cfg);
    const auto ideal = simulate(t, p, cfg, {.free_crossings = true});
    EXPECT_LT(ideal.total_ticks, real.total_ticks);
    EXPECT_EQ(ideal.crossings, real.crossings);
    EXPECT_LT(ideal.energy.total(), real.energy.total());
}

TEST(Sim, LinkBandwidthBoundsStreaming) {
    // Every access misses; the host cannot beat one line per link slot.
    const auto w = gen_random_stream_workload(4000, 9);
    MachineConfig cfg;
    auto p = StaticPlacement::uniform(w.program, Side::host);
    const auto r = simulate(trace_of(w), p, cfg);
    EXPECT_GE(r.total_ticks, r.link_transfers * cfg.link_line_ticks());
}

TEST(Sim, MonotoneInDramLatency) {
    const auto w = gen_random_stream_workload(3000, 2);
    const auto t = trace_of(w);
    std::uint64_t prev = 0;
    for (std::uint64_t lat : {20u, 46u, 80u, 160u}) {
        MachineConfig cfg;
        cfg.dram_latency = lat;
        auto p = StaticPlacement::uniform(w.program, Side::host);
        const auto cycles = simulate(t, p, cfg).total_cycles();
        EXPECT_GT(cycles, prev);
        prev = cycles;
    }
}

TEST(Sim, SegmentStatsCoverTrace) {
    const auto w = gen_synth_workload(512, 3, 1);
    const auto t = trace_of(w);
    auto p = split(Side::host, Side::ndp);
    const auto r = simulate(t, p, MachineConfig{});
    std::uint64_t n = 0;
    for (const auto& [id, s] : r.segments) n += s.instructions;
    EXPECT_EQ(n, t.records.size());
    EXPECT_EQ(r.instructions, t.records.size());
    EXPECT_EQ(r.handoffs, 1u);
}

TEST(Oracle, ComputeOnlyTiesGoToHost) {
    const auto w = gen_compute_workload(500);
    const auto o = oracle_segment_timing(w.program, w.params, w.seed, MachineConfig{});
    ASSERT_EQ(o.size(), 1u);
    EXPECT_EQ(o.at(1).host_cycles, o.at(1).ndp_cycles);
    EXPECT_EQ(o.at(1).best, Side::host);
}

TEST(Oracle, RandomLargeArrayPrefersNdp) {
    const auto w = gen_random_stream_workload(5000, 4);
    const auto o = oracle_segment_timing(w.program, w.params, w.seed, MachineConfig{});
    EXPECT_EQ(o.at(1).best, Side::ndp);
}

TEST(Oracle, LlcResidentReusePrefersHost) {
    const auto w = gen_synth_workload(16384, 8, 4);
    const auto o = oracle_segment_timing(w.program, w.params, w.seed, MachineConfig{});
    EXPECT_EQ(o.at(1).best, Side::ndp);
    EXPECT_EQ(o.at(2).best, Side::host);
}

TEST(Sim, ReportFormats) {
    const auto w = gen_synth_workload(256, 1, 1);
    auto p = split(Side::host, Side::host);
    const auto r = simulate(trace_of(w), p, MachineConfig{});
    const auto kv = to_key_values(r);
    EXPECT_NE(kv.find("total_cycles = " + std::to_string(r.total_cycles())), std::string::npos);
    const auto csv = segments_csv(r);
    EXPECT_EQ(csv.rfind("segment,instances,cycles", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
