#include <gtest/gtest.h>

#include <random>

#include "alp/marshal.hpp"
#include "alp/synth.hpp"

using namespace alp;

namespace {

AccessSpec seq(const std::string& a, std::int64_t stride = 1) { return {a, Pattern::sequential, stride, "", 8}; }
AccessSpec rnd(const std::string& a, const std::string& role) { return {a, Pattern::random, 1, role, 8}; }

// Two segments, S1 with two stores and S2 with a store then a load.
SegmentProgram two_segments() {
    SegmentProgram p;
    p.live_in = {1};
    p.arrays = {{"a", "L", 8}};
    p.segments = {
        {1,
         {{0x10, InstrKind::store, {}, {1}, seq("a")},
          {0x14, InstrKind::store, {}, {1}, seq("a")},
          {0x18, InstrKind::compute, {2}, {1}, std::nullopt}},
         "T"},
        {2,
         {{0x20, InstrKind::store, {}, {2}, seq("a")},
          {0x24, InstrKind::load, {3}, {2}, seq("a")}},
         "T"},
    };
    p.edges = {{1, 2}};
    return build_program(p);
}

ClusterAnnotation pair_cluster() {
    return {0, {1, 2}, ClusterKind::producer_consumer, 15, {Role::producer, Role::consumer}, false, {}};
}

TraceRecord rec(std::uint64_t seq, SegmentId s, Pc pc, InstrKind k, Addr a) { return {seq, s, pc, k, a}; }

constexpr Addr A = 0x1000'0000;
constexpr Addr B = 0x1000'0040;

// Reference: for each load that is the first read of its line in its
// instance, scan the whole preceding instance for the last store to that line.
GeneratorMap brute_force(const DynamicTrace& t, const std::vector<ClusterAnnotation>& cs) {
    GeneratorMap g;
    for (const auto& c : cs) g[c.id];
    const auto inst = segment_instances(t);
    for (std::size_t k = 1; k < inst.size(); ++k) {
        const SegmentId prev = inst[k - 1].segment, cur = inst[k].segment;
        const ClusterAnnotation* owner = nullptr;
        for (const auto& c : cs) {
            auto ip = std::find(c.members.begin(), c.members.end(), prev);
            auto ic = std::find(c.members.begin(), c.members.end(), cur);
            if (ip == c.members.end() || ic == c.members.end()) continue;
            if (c.kind == ClusterKind::producer_consumer ? (prev == c.producer() && cur == c.consumer()) : ip < ic)
                owner = &c;
        }
        if (!owner) continue;
        for (std::size_t i = inst[k].begin; i < inst[k].end; ++i) {
            const auto& r = t.records[i];
            if (r.kind != InstrKind::load) continue;
            bool first = true;
            for (std::size_t j = inst[k].begin; j < i; ++j)
                if (t.records[j].kind == InstrKind::load && line_of(*t.records[j].address) == line_of(*r.address))
                    first = false;
            if (!first) continue;
            for (std::size_t j = inst[k - 1].end; j-- > inst[k - 1].begin;) {
                const auto& w = t.records[j];
                if (w.kind == InstrKind::store && line_of(*w.address) == line_of(*r.address)) {
                    g[owner->id].insert(w.pc);
                    break;
                }
            }
        }
    }
    return g;
}

}  // namespace

TEST(DetectGenerators, LastWriterWins) {
    const auto p = two_segments();
    DynamicTrace t{{rec(0, 1, 0x10, InstrKind::store, A), rec(1, 1, 0x14, InstrKind::store, A),
                    rec(2, 2, 0x24, InstrKind::load, A)}};
    const auto g = detect_generators(p, t, {pair_cluster()});
    EXPECT_EQ(g.at(0), (std::set<Pc>{0x14}));
}

TEST(DetectGenerators, OwnWritesAreNotGenerators) {
    const auto p = two_segments();
    DynamicTrace t{{rec(0, 1, 0x10, InstrKind::store, A), rec(1, 2, 0x20, InstrKind::store, B),
                    rec(2, 2, 0x24, InstrKind::load, B)}};
    EXPECT_TRUE(detect_generators(p, t, {pair_cluster()}).at(0).empty());
}

TEST(DetectGenerators, EmptyPreviousSegment) {
    const auto p = two_segments();
    DynamicTrace t{{rec(0, 1, 0x18, InstrKind::compute, 0), rec(1, 2, 0x24, InstrKind::load, A)}};
    t.records[0].address.reset();
    EXPECT_TRUE(detect_generators(p, t, {pair_cluster()}).at(0).empty());
}

TEST(DetectGenerators, OnlyFirstReadOfLineCounts) {
    // The second load of A follows a fresh write in S2's own instance; only the
    // first read looks at the previous instance.
    const auto p = two_segments();
    DynamicTrace t{{rec(0, 1, 0x10, InstrKind::store, A), rec(1, 2, 0x24, InstrKind::load, A + 8),
                    rec(2, 2, 0x24, InstrKind::load, A)}};
    EXPECT_EQ(detect_generators(p, t, {pair_cluster()}).at(0), (std::set<Pc>{0x10}));
}

TEST(DetectGenerators, UnknownSegmentIsInconsistent) {
    const auto p = two_segments();
    DynamicTrace t{{rec(0, 9, 0x10, InstrKind::store, A)}};
    EXPECT_THROW(detect_generators(p, t, {pair_cluster()}), InconsistentTrace);
}

TEST(DetectGenerators, MatchesBruteForceOnRandomTraces) {
    const auto p = two_segments();
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        DynamicTrace t;
        std::uint64_t seq = 0;
        const int instances = std::uniform_int_distribution<int>(1, 6)(rng);
        SegmentId s = 1;
        for (int k = 0; k < instances; ++k) {
            const int n = std::uniform_int_distribution<int>(1, 12)(rng);
            for (int i = 0; i < n; ++i) {
                const Addr a = A + 64 * std::uniform_int_distribution<int>(0, 5)(rng) +
                               8 * std::uniform_int_distribution<int>(0, 7)(rng);
                const bool store = std::bernoulli_distribution(0.5)(rng);
                const Pc pc = s == 1 ? (store ? (i % 2 ? 0x14 : 0x10) : 0x18) : (store ? 0x20 : 0x24);
                if (s == 1 && !store) continue;
                t.records.push_back(rec(seq++, s, pc, store ? InstrKind::store : InstrKind::load, a));
            }
            s = s == 1 ? 2 : 1;
        }
        const auto cs = std::vector<ClusterAnnotation>{pair_cluster()};
        ASSERT_EQ(detect_generators(p, t, cs), brute_force(t, cs)) << "trial " << trial;
    }
}

TEST(DetectGenerators, SynthProducerStoreIsTheGenerator) {
    const auto w = gen_synth_workload(512, 2, 1);
    const auto cs = cluster(w.program, liveness(w.program));
    const auto t = unroll_trace(w.program, w.profiling_params(), 2);
    const auto g = detect_generators(w.program, t, cs);
    EXPECT_EQ(g.at(0), (std::set<Pc>{0x400014}));
    for (Pc pc : g.at(0)) EXPECT_EQ(w.program.find_instr(pc)->kind, InstrKind::store);
}

TEST(DetectGenerators, StableAcrossSeeds) {
    std::set<Pc> first;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto w = gen_synth_workload(1024, 2, seed);
        const auto cs = cluster(w.program, liveness(w.program));
        const auto g = detect_generators(w.program, unroll_trace(w.program, w.profiling_params(), seed), cs).at(0);
        if (seed == 1) first = g;
        EXPECT_EQ(g, first) << "seed " << seed;
    }
    EXPECT_FALSE(first.empty());
}

TEST(DetectGenerators, ProfilingSeedAgreesWithEvaluationSeed) {
    const auto w = gen_synth_workload(2048, 2, 7);
    const auto cs = cluster(w.program, liveness(w.program));
    const auto prof = detect_generators(w.program, unroll_trace(w.program, w.profiling_params(), 8), cs);
    const auto eval = detect_generators(w.program, unroll_trace(w.program, w.params, 7), cs);
    EXPECT_EQ(prof, eval);
}

TEST(ConcurrentMode, SameSequentialPattern) {
    const auto w = gen_synth_workload(64, 1, 1, ConsumerPattern::sequential);
    const auto cs = cluster(w.program, liveness(w.program));
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_TRUE(detect_concurrent_mode(w.program, cs[0]));
}

TEST(ConcurrentMode, RandomConsumerIsNotConcurrent) {
    const auto w = gen_synth_workload(64, 1, 1);
    const auto cs = cluster(w.program, liveness(w.program));
    EXPECT_FALSE(detect_concurrent_mode(w.program, cs[0]));
}

TEST(ConcurrentMode, ConsumerThatOnlyWritesIsNotConcurrent) {
    SegmentProgram p;
    p.live_in = {1};
    p.arrays = {{"a", "L", 8}};
    p.segments = {{1, {{0x10, InstrKind::store, {}, {1}, seq("a")}, {0x14, InstrKind::compute, {2}, {1}, {}}}, "T"},
                  {2, {{0x20, InstrKind::store, {}, {2}, seq("a")}}, "T"}};
    p.edges = {{1, 2}};
    EXPECT_FALSE(detect_concurrent_mode(build_program(p), pair_cluster()));
}

TEST(ConcurrentMode, StrideMismatch) {
    SegmentProgram p;
    p.live_in = {1};
    p.arrays = {{"a", "L", 8}};
    p.segments = {{1, {{0x10, InstrKind::store, {}, {1}, seq("a")}, {0x14, InstrKind::compute, {2}, {1}, {}}}, "T"},
                  {2, {{0x20, InstrKind::load, {3}, {2}, seq("a", 2)}}, "T"}};
    p.edges = {{1, 2}};
    EXPECT_FALSE(detect_concurrent_mode(build_program(p), pair_cluster()));
    p.segments[1].body[0].access = seq("a");
    EXPECT_TRUE(detect_concurrent_mode(build_program(p), pair_cluster()));
    p.segments[1].body[0].access = rnd("a", "x");
    EXPECT_FALSE(detect_concurrent_mode(build_program(p), pair_cluster()));
}

TEST(AnnotateTransfer, PopulatesAndRelabels) {
    auto a = pair_cluster();
    auto b = pair_cluster();
    b.id = 1;
    b.members = {3, 4};
    const auto out = annotate_transfer({a, b}, {{0, {0x14}}, {1, {}}}, {{0, true}, {1, true}});
    EXPECT_EQ(out[0].generator_pcs, (std::set<Pc>{0x14}));
    EXPECT_TRUE(out[0].concurrent);
    EXPECT_EQ(out[0].kind, ClusterKind::producer_consumer);
    EXPECT_EQ(out[1].kind, ClusterKind::inseparable);
    EXPECT_EQ(out[1].roles, (std::vector<Role>{Role::inseparable, Role::inseparable}));
    EXPECT_FALSE(out[1].concurrent);
}

TEST(AnnotateTransfer, ProfileSynthAndInseparableFixture) {
    const auto w = gen_synth_workload(32768, 8, 1);
    auto cs = profile_clusters(w, cluster(w.program, liveness(w.program)));
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_EQ(cs[0].kind, ClusterKind::producer_consumer);
    EXPECT_EQ(cs[0].generator_pcs, (std::set<Pc>{0x400014}));
    EXPECT_FALSE(cs[0].concurrent);

    const auto ws = gen_synth_workload(32768, 8, 1, ConsumerPattern::sequential);
    auto cq = profile_clusters(ws, cluster(ws.program, liveness(ws.program)));
    EXPECT_TRUE(cq[0].concurrent);

    const auto wi = gen_inseparable_workload(8192, 4, 8, 1);
    const auto before = cluster(wi.program, liveness(wi.program));
    ASSERT_EQ(before.size(), 1u);
    EXPECT_EQ(before[0].members, (std::vector<SegmentId>{1, 2}));
    auto ci = profile_clusters(wi, before);
    EXPECT_EQ(ci[0].kind, ClusterKind::inseparable);
    EXPECT_TRUE(ci[0].generator_pcs.empty());
}
