#include <gtest/gtest.h>

#include "alp/marshal.hpp"
#include "alp/runtime.hpp"
#include "alp/synth.hpp"

using namespace alp;

namespace {

EpochStats stats(std::uint64_t refs, std::uint64_t l1, std::uint64_t llc, double ipc = 1.0) {
    EpochStats s;
    s.instructions = 10000;
    s.ticks = static_cast<Tick>(10000 * kTicksPerCycle / ipc);
    s.mem_refs = refs;
    s.l1_misses = l1;
    s.llc_misses = llc;
    return s;
}

const EpochStats kIntensive = stats(1000, 300, 285);
const EpochStats kFriendly = stats(1000, 300, 30);

ClusterAnnotation pair(bool concurrent, bool generators = true) {
    ClusterAnnotation c;
    c.id = 3;
    c.members = {1, 2};
    c.kind = ClusterKind::producer_consumer;
    c.roles = {Role::producer, Role::consumer};
    c.concurrent = concurrent;
    if (generators) c.generator_pcs = {0x40};
    return c;
}

}  // namespace

TEST(Table, SizeFromFieldWidths) {
    EXPECT_EQ(kEntryBits, 25u);
    EXPECT_EQ(table_size({50}), 1250u);
    EXPECT_EQ(table_size({1}), 25u);
    EXPECT_EQ(table_size({0}), 0u);
}

TEST(Table, LruEvictsLeastRecentRow) {
    OffloadTable t({2});
    t.touch(1).ipc_host = 3;
    t.touch(2);
    t.touch(1);
    t.touch(3);
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.evictions(), 1u);
    ASSERT_NE(t.find(1), nullptr);
    EXPECT_EQ(t.find(1)->ipc_host, 3);
    EXPECT_EQ(t.find(2), nullptr);
    EXPECT_NE(t.find(3), nullptr);
}

TEST(Table, IdKeepsSixBits) {
    OffloadTable t;
    EXPECT_EQ(t.touch(65).id, 1);
}

TEST(Quantize, Examples) {
    EXPECT_EQ(quantize_ratio(0.95), 15);
    EXPECT_EQ(quantize_ratio(1.0), 15);
    EXPECT_EQ(quantize_ratio(0.5), 8);
    EXPECT_EQ(quantize_ratio(0.0), 0);
    EXPECT_EQ(quantize_ipc(2.0, 4), 8);
    EXPECT_EQ(quantize_ipc(4.0, 4), 15);
    EXPECT_EQ(quantize_ipc(0.0, 4), 0);
}

TEST(Monitor, QuotientFromGlobalRates) {
    auto e = monitor_epoch(kIntensive, {}, 4);
    EXPECT_EQ(e.l1llc_ratio, 15);
    EXPECT_EQ(e.ipc_host, 4);
    EXPECT_EQ(e.host_epochs, 1u);
    const auto none = monitor_epoch(stats(1000, 0, 0), {}, 4);
    EXPECT_EQ(none.l1llc_ratio, 0);
}

TEST(Monitor, NdpEpochKeepsQuotient) {
    auto e = monitor_epoch(kFriendly, {}, 4);
    EpochStats n = kIntensive;
    n.side = Side::ndp;
    e = monitor_epoch(n, e, 4);
    EXPECT_EQ(e.l1llc_ratio, quantize_ratio(0.1));
    EXPECT_EQ(e.ndp_epochs, 1u);
}

TEST(Decide, ThresholdLevel) {
    OffloadTableEntry e;
    EXPECT_THROW(decide_offload(e, 14), NoHistory);
    e.host_epochs = 1;
    e.l1llc_ratio = 15;
    EXPECT_EQ(decide_offload(e, 14), Side::ndp);
    EXPECT_EQ(e.decision, Side::ndp);
    e.l1llc_ratio = 3;
    EXPECT_EQ(decide_offload(e, 14), Side::host);
    e.l1llc_ratio = 0;
    EXPECT_EQ(decide_offload(e, 14), Side::host);
}

TEST(Rollback, QuantizedCompare) {
    OffloadTableEntry e;
    EXPECT_THROW(check_rollback(e), NoHistory);
    e.decision = Side::ndp;
    e.ndp_epochs = 1;
    e.ipc_host = 9;
    e.ipc_ndp = 6;
    EXPECT_EQ(check_rollback(e), Rollback::migrate_back);
    e.ipc_host = 6;
    e.ipc_ndp = 9;
    EXPECT_EQ(check_rollback(e), Rollback::stay);
    e.ipc_ndp = 6;
    EXPECT_EQ(check_rollback(e), Rollback::stay);
}

TEST(TransferMap, SmallProducerIntensive) {
    const auto m = map_transfer_cluster(pair(false), 1024, MachineConfig{}, kIntensive, kFriendly);
    EXPECT_EQ(m.leaf, TransferLeaf::producer_ndp);
    EXPECT_EQ(m.producer, Side::ndp);
    EXPECT_EQ(m.consumer, Side::host);
    EXPECT_TRUE(m.transfer);
}

TEST(TransferMap, SmallBothIntensive) {
    const auto m = map_transfer_cluster(pair(false), 1024, MachineConfig{}, kIntensive, kIntensive);
    EXPECT_EQ(m.leaf, TransferLeaf::both_ndp);
    EXPECT_EQ(m.producer, Side::ndp);
    EXPECT_EQ(m.consumer, Side::ndp);
    EXPECT_FALSE(m.transfer);
}

TEST(TransferMap, SmallNeitherIntensive) {
    const auto m = map_transfer_cluster(pair(true), 1024, MachineConfig{}, kFriendly, kFriendly);
    EXPECT_EQ(m.leaf, TransferLeaf::both_host);
    EXPECT_EQ(m.producer, Side::host);
    EXPECT_EQ(m.consumer, Side::host);
    EXPECT_FALSE(m.transfer);
}

TEST(TransferMap, SmallConsumerIntensive) {
    const auto m = map_transfer_cluster(pair(false), 1024, MachineConfig{}, kFriendly, kIntensive);
    EXPECT_EQ(m.leaf, TransferLeaf::consumer_ndp);
    EXPECT_EQ(m.producer, Side::host);
    EXPECT_EQ(m.consumer, Side::ndp);
    EXPECT_TRUE(m.transfer);
}

TEST(TransferMap, LargeConcurrentIntensive) {
    MachineConfig cfg;
    const auto m = map_transfer_cluster(pair(true), 2 * cfg.llc.size_bytes, cfg, kIntensive, kFriendly);
    EXPECT_EQ(m.leaf, TransferLeaf::large_concurrent);
    EXPECT_EQ(m.producer, Side::ndp);
    EXPECT_EQ(m.consumer, Side::host);
    EXPECT_TRUE(m.transfer);
}

TEST(TransferMap, LargeNotConcurrent) {
    MachineConfig cfg;
    const auto m = map_transfer_cluster(pair(false), 2 * cfg.llc.size_bytes, cfg, kIntensive, kFriendly);
    EXPECT_EQ(m.leaf, TransferLeaf::large_host);
    EXPECT_EQ(m.producer, Side::host);
    EXPECT_FALSE(m.transfer);
    const auto f = map_transfer_cluster(pair(true), 2 * cfg.llc.size_bytes, cfg, kFriendly, kIntensive);
    EXPECT_EQ(f.leaf, TransferLeaf::large_host);
}

TEST(TransferMap, LlcSizeBoundaryIsLarge) {
    MachineConfig cfg;
    const auto m = map_transfer_cluster(pair(false), cfg.llc.size_bytes, cfg, kIntensive, kFriendly);
    EXPECT_EQ(m.leaf, TransferLeaf::large_host);
}

TEST(TransferMap, RejectsOtherClusters) {
    MachineConfig cfg;
    EXPECT_THROW(map_transfer_cluster(pair(false, false), 1, cfg, kIntensive, kFriendly), NotTransferCluster);
    auto c = pair(false);
    c.kind = ClusterKind::inseparable;
    EXPECT_THROW(map_transfer_cluster(c, 1, cfg, kIntensive, kFriendly), NotTransferCluster);
}

TEST(Inseparable, AggregateDecision) {
    auto c = pair(false, false);
    c.kind = ClusterKind::inseparable;
    MachineConfig cfg;
    auto hot = map_inseparable(c, 1024, cfg, {{1, kIntensive}, {2, stats(1000, 100, 100)}});
    EXPECT_TRUE(hot.aggregated);
    EXPECT_EQ(hot.sides.at(1), Side::ndp);
    EXPECT_EQ(hot.sides.at(2), Side::ndp);
    auto cold = map_inseparable(c, 1024, cfg, {{1, stats(1000, 400, 40)}, {2, stats(1000, 100, 10)}});
    EXPECT_EQ(cold.sides.at(1), Side::host);
    EXPECT_EQ(cold.sides.at(2), Side::host);
}

TEST(Inseparable, LargeDataPlacesIndependently) {
    auto c = pair(false, false);
    c.kind = ClusterKind::inseparable;
    MachineConfig cfg;
    auto m = map_inseparable(c, 2 * cfg.llc.size_bytes, cfg, {{1, kIntensive}, {2, kFriendly}});
    EXPECT_FALSE(m.aggregated);
    EXPECT_EQ(m.sides.at(1), Side::ndp);
    EXPECT_EQ(m.sides.at(2), Side::host);
}

TEST(InterData, SharedArrayBytes) {
    const auto w = gen_synth_workload(1000, 2, 1);
    EXPECT_EQ(inter_data_bytes(w.program, w.params, {1}, {2}), 8000u);
    EXPECT_EQ(inter_data_bytes(w.program, w.params, {2}, {1}), 0u);
}

TEST(Package, StartPcAndLiveIns) {
    const auto w = gen_synth_workload(100, 1, 1);
    const auto live = liveness(w.program);
    const auto pkg = make_offload_package(w.program, live, {1});
    EXPECT_EQ(pkg.start_pc, w.program.segment(1).body.front().pc);
    EXPECT_EQ(pkg.live_ins, live.at(1).reg_in);
}

TEST(DecisionLog, CsvShape) {
    const std::vector<DecisionRecord> log{{0, 1, Side::host, 15, 4, 0, Action::offload},
                                          {1, 1, Side::ndp, 15, 4, 2, Action::rollback}};
    EXPECT_EQ(decision_log_csv(log),
              "epoch,unit,side,quotient_level,ipc_host_level,ipc_ndp_level,action\n"
              "0,1,host,15,4,0,offload\n1,1,ndp,15,4,2,rollback\n");
}

TEST(AlpPolicy, RollbackAfterOneNdpEpoch) {
    MachineConfig cfg;
    cfg.translation_latency = 200;
    const auto w = gen_random_stream_workload(40000, 3);
    const auto trace = unroll_trace(w.program, w.params, w.seed);
    AlpPolicy policy({&w.program, w.params, {}, {}}, cfg);
    simulate(trace, policy, cfg);
    const auto& log = policy.log();
    ASSERT_GE(log.size(), 3u);
    EXPECT_EQ(log[0].action, Action::offload);
    EXPECT_EQ(log[0].side, Side::host);
    EXPECT_EQ(log[1].action, Action::rollback);
    EXPECT_EQ(log[1].side, Side::ndp);
    for (std::size_t i = 2; i < log.size(); ++i) {
        EXPECT_EQ(log[i].side, Side::host);
        EXPECT_EQ(log[i].action, Action::stay);
    }
    EXPECT_EQ(policy.packages().size(), 1u);
}

TEST(AlpPolicy, ProducerOffloadedWithPushes) {
    MachineConfig cfg;
    auto w = gen_synth_workload(16384, 4, 2);
    const auto trace = unroll_trace(w.program, w.params, w.seed);
    auto clusters = profile_clusters(w, cluster(w.program, liveness(w.program)));
    AlpPolicy policy({&w.program, w.params, clusters, first_host_epochs(trace, cfg)}, cfg);
    const auto r = simulate(trace, policy, cfg);
    ASSERT_EQ(policy.transfer_mappings().size(), 1u);
    EXPECT_EQ(policy.transfer_mappings().begin()->second.leaf, TransferLeaf::producer_ndp);
    EXPECT_EQ(policy.log().front().action, Action::transfer);
    EXPECT_GT(r.transfers.lines_moved, 0u);
    EXPECT_EQ(policy.table().find(1)->block_type, BlockType::producer);
}
