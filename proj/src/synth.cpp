#include "alp/synth.hpp"

namespace alp {

namespace {

AbstractInstr op(Pc pc, InstrKind kind, std::set<Reg> defs, std::set<Reg> uses) {
    return AbstractInstr{pc, kind, std::move(defs), std::move(uses), std::nullopt};
}

AbstractInstr mem(Pc pc, InstrKind kind, std::set<Reg> defs, std::set<Reg> uses, AccessSpec a) {
    return AbstractInstr{pc, kind, std::move(defs), std::move(uses), std::move(a)};
}

AccessSpec seq(std::string array) { return {std::move(array), Pattern::sequential, 1, "", 8}; }
AccessSpec rnd(std::string array, std::string role) {
    return {std::move(array), Pattern::random, 1, std::move(role), 8};
}

void require_positive(std::int64_t v, const char* what) {
    if (v < 1) throw ParameterError(std::string(what) + " must be >= 1");
}

}  // namespace

Workload gen_synth_workload(std::int64_t n, std::int64_t n_reuse, std::uint64_t seed, ConsumerPattern consumer,
                            std::int64_t input_length) {
    require_positive(n, "N");
    require_positive(n_reuse, "n_reuse");
    require_positive(input_length, "input length");

    // r1..r3 input pointers, r4 N, r5 n_reuse; r10/r11 are out's pointer and
    // length, the values that flow from producer to consumer.
    SegmentProgram p;
    p.live_in = {1, 2, 3, 4, 5};
    p.arrays = {{"in1", "M", 8}, {"in2", "M", 8}, {"in3", "M", 8}, {"out", "N", 8}};

    Segment producer{1, {}, "N"};
    producer.body = {
        op(0x400000, InstrKind::compute, {10, 11}, {4}),
        mem(0x400004, InstrKind::load, {20}, {1}, rnd("in1", "idx1")),
        mem(0x400008, InstrKind::load, {21}, {2}, rnd("in2", "idx1")),
        mem(0x40000c, InstrKind::load, {22}, {3}, rnd("in3", "idx1")),
        op(0x400010, InstrKind::compute, {23}, {20, 21, 22}),
        mem(0x400014, InstrKind::store, {}, {23, 10}, seq("out")),
        op(0x400018, InstrKind::branch, {}, {4, 11}),
    };

    Segment reuse{2, {}, "n_reuse*N"};
    reuse.body = {
        mem(0x400100, InstrKind::load, {30}, {10, 11},
            consumer == ConsumerPattern::random ? rnd("out", "idx2") : seq("out")),
        op(0x400104, InstrKind::compute, {31}, {30, 5}),
        mem(0x400108, InstrKind::store, {}, {31, 10}, seq("out")),
        op(0x40010c, InstrKind::branch, {}, {4, 5}),
    };

    p.segments = {producer, reuse};
    p.edges = {{1, 2}};

    Workload w;
    w.name = consumer == ConsumerPattern::random ? "synth" : "synth_seq";
    w.program = build_program(std::move(p));
    w.params = {{"M", input_length}, {"N", n}, {"n_reuse", n_reuse}};
    w.profile_params = {{"N", std::min<std::int64_t>(n, kDefaultProfileElements)}};
    w.seed = seed;
    return w;
}

Workload gen_inseparable_workload(std::int64_t buf_elements, std::int64_t reuse, std::int64_t rounds,
                                  std::uint64_t seed, std::int64_t input_length) {
    require_positive(buf_elements, "buffer length");
    require_positive(reuse, "reuse");
    require_positive(rounds, "rounds");

    SegmentProgram p;
    p.live_in = {1, 2, 3, 4};
    p.arrays = {{"big", "M", 8}, {"buf", "B", 8}};

    Segment gather{1, {}, "B"};
    gather.body = {
        mem(0x500000, InstrKind::load, {10}, {1}, rnd("big", "ia")),
        mem(0x500004, InstrKind::load, {11}, {2}, seq("buf")),
        op(0x500008, InstrKind::compute, {12, 13}, {10, 11}),
        op(0x50000c, InstrKind::branch, {}, {3}),
    };
    Segment update{2, {}, "reuse*B"};
    update.body = {
        mem(0x500100, InstrKind::load, {20}, {2, 12}, rnd("buf", "ib")),
        op(0x500104, InstrKind::compute, {21}, {20, 13, 4}),
        mem(0x500108, InstrKind::store, {}, {21, 2}, seq("buf")),
        op(0x50010c, InstrKind::branch, {}, {3, 4}),
    };
    p.segments = {gather, update};
    p.edges = {{1, 2}, {2, 1}};
    p.loops = {{{1, 2}, "R"}};

    Workload w;
    w.name = "inseparable";
    w.program = build_program(std::move(p));
    w.params = {{"B", buf_elements}, {"M", input_length}, {"R", rounds}, {"reuse", reuse}};
    w.profile_params = {{"B", std::min<std::int64_t>(buf_elements, kDefaultProfileElements)}, {"R", 2}};
    w.seed = seed;
    return w;
}

Workload gen_random_stream_workload(std::int64_t accesses, std::uint64_t seed, std::int64_t input_length) {
    require_positive(accesses, "accesses");
    SegmentProgram p;
    p.live_in = {1, 2};
    p.arrays = {{"table", "M", 8}};
    Segment s{1, {}, "K"};
    s.body = {
        mem(0x600000, InstrKind::load, {10}, {1}, rnd("table", "k")),
        op(0x600004, InstrKind::compute, {11}, {10}),
        op(0x600008, InstrKind::compute, {12}, {11}),
        op(0x60000c, InstrKind::branch, {}, {2}),
    };
    p.segments = {s};
    Workload w;
    w.name = "stream";
    w.program = build_program(std::move(p));
    w.params = {{"K", accesses}, {"M", input_length}};
    w.seed = seed;
    return w;
}

Workload gen_compute_workload(std::int64_t iterations) {
    require_positive(iterations, "iterations");
    SegmentProgram p;
    p.live_in = {1};
    Segment s{1, {}, "I"};
    s.body = {
        op(0x700000, InstrKind::compute, {10}, {1}),
        op(0x700004, InstrKind::compute, {11}, {10}),
        op(0x700008, InstrKind::compute, {12}, {11}),
        op(0x70000c, InstrKind::branch, {}, {1}),
    };
    p.segments = {s};
    Workload w;
    w.name = "compute";
    w.program = build_program(std::move(p));
    w.params = {{"I", iterations}};
    return w;
}

}  // namespace alp
