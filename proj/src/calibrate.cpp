#include "alp/calibrate.hpp"

#include <algorithm>

#include "alp/analysis.hpp"
#include "alp/sim.hpp"

namespace alp {

namespace {

std::uint64_t cycles_with(const DynamicTrace& trace, const SegmentProgram& p, const MachineConfig& cfg,
                          SegmentId a, Side sa, SegmentId b, Side sb) {
    std::map<SegmentId, Side> sides;
    for (const auto& s : p.segments) sides[s.id] = Side::host;
    sides[a] = sa;
    sides[b] = sb;
    StaticPlacement place(std::move(sides));
    return simulate(trace, place, cfg).total_cycles();
}

}  // namespace

std::vector<PairVerdict> evaluate_pairs(const MachineConfig& cfg, const std::vector<Workload>& corpus) {
    std::vector<PairVerdict> out;
    for (const auto& w : corpus) {
        const auto live = liveness(w.program);
        std::optional<DynamicTrace> trace;
        for (const auto& e : w.program.edges) {
            if (e.from == e.to) continue;
            const double c = connectivity(live.at(e.from), live.at(e.to));
            if (c <= 0.0) continue;
            if (!trace) trace = unroll_trace(w.program, w.params, w.seed);
            PairVerdict v{e.from, e.to, c, 0, 0};
            v.split_cycles = std::min(cycles_with(*trace, w.program, cfg, e.from, Side::host, e.to, Side::ndp),
                                      cycles_with(*trace, w.program, cfg, e.from, Side::ndp, e.to, Side::host));
            v.merged_cycles = std::min(cycles_with(*trace, w.program, cfg, e.from, Side::host, e.to, Side::host),
                                       cycles_with(*trace, w.program, cfg, e.from, Side::ndp, e.to, Side::ndp));
            out.push_back(v);
        }
    }
    return out;
}

double calibrate_threshold(const MachineConfig& cfg, const std::vector<Workload>& corpus) {
    if (corpus.empty()) throw EmptyCorpus("no workloads to calibrate on");
    const auto pairs = evaluate_pairs(cfg, corpus);
    double best = kThresholdFloor;
    double ceiling = 0.0;
    for (const auto& v : pairs) ceiling = std::max(ceiling, v.connectivity);
    for (int k = 1; k <= 20; ++k) {
        const double t = k / 20.0;
        if (t < kThresholdFloor || t > ceiling) continue;
        const bool ok = std::none_of(pairs.begin(), pairs.end(),
                                     [&](const PairVerdict& v) { return v.connectivity <= t && v.split_loses(); });
        if (ok) best = t;
    }
    return best;
}

}  // namespace alp
