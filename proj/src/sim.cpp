#include "alp/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <queue>
#include <sstream>

namespace alp {

double EpochStats::ipc() const {
    return ticks == 0 ? 0.0 : static_cast<double>(instructions) * kTicksPerCycle / static_cast<double>(ticks);
}

double SegmentStats::ipc() const {
    return ticks == 0 ? 0.0 : static_cast<double>(instructions) * kTicksPerCycle / static_cast<double>(ticks);
}

const TransferPlan& PlacementPolicy::transfers() const {
    static const TransferPlan none;
    return none;
}

StaticPlacement::StaticPlacement(std::map<SegmentId, Side> sides, TransferPlan plan)
    : sides_(std::move(sides)), plan_(std::move(plan)) {}

StaticPlacement StaticPlacement::uniform(const SegmentProgram& p, Side s) {
    std::map<SegmentId, Side> m;
    for (const auto& seg : p.segments) m[seg.id] = s;
    return StaticPlacement(std::move(m));
}

Side StaticPlacement::side_of(SegmentId s) const {
    auto it = sides_.find(s);
    if (it == sides_.end()) throw PlacementGap("segment " + std::to_string(s) + " has no placement");
    return it->second;
}

namespace {

class Engine {
  public:
    Engine(const DynamicTrace& trace, PlacementPolicy& policy, const MachineConfig& cfg, SimOptions opts)
        : trace_(trace), policy_(policy), cfg_(cfg), mem_(cfg, opts.free_crossings) {}

    SimResult run() {
        const auto instances = segment_instances(trace_);
        for (std::size_t k = 0; k < instances.size(); ++k) run_instance(instances, k);
        res_.total_ticks = now_;
        res_.energy = mem_.energy();
        res_.crossings = mem_.stats().crossings;
        res_.dram_reads = mem_.stats().dram_reads;
        res_.link_transfers = mem_.stats().link_transfers;
        return res_;
    }

  private:
    struct Push {
        Tick enqueued;
        Tick arrival;
    };

    Tick handoff() const { return 2 * cfg_.link_latency * kTicksPerCycle; }

    void close_epoch(UnitId unit, Side side, Tick t) {
        auto& acc = epochs_[unit];
        acc.ticks += t - mark_;
        mark_ = t;
        acc.unit = unit;
        acc.side = side;
        const EpochStats done = acc;
        acc = EpochStats{};
        acc.index = done.index + 1;
        policy_.on_epoch(done, t);
    }

    void push(Pc pc, LineAddr line, Side from, Tick t) {
        const auto route = consumers_.find(pc);
        if (route == consumers_.end()) return;
        const Side to = policy_.side_of(route->second);
        if (to == from) return;
        const auto cost = mem_.transfer_line(line, from, to, t);
        if (cost.energy_pj == 0) return;
        ++res_.transfers.lines_moved;
        pushes_.push_back({t, t + cost.latency});
    }

    void load_routes(SegmentId seg) {
        consumers_.clear();
        for (const auto& [pc, r] : policy_.transfers())
            if (r.producer == seg) consumers_[pc] = r.consumer;
    }

    void flush_open(Side side, Tick t) {
        for (const auto& [pc, line] : open_) push(pc, line, side, t);
        open_.clear();
    }

    // Earliest start for a consumer that may overlap its producer.
    std::optional<Tick> concurrent_start(const std::vector<InstanceSpan>& inst, std::size_t k) const {
        if (k == 0 || !last_producer_) return std::nullopt;
        const SegmentId prev = inst[k - 1].segment, cur = inst[k].segment;
        bool concurrent = false;
        for (const auto& [pc, r] : policy_.transfers())
            if (r.producer == prev && r.consumer == cur && r.concurrent) concurrent = true;
        if (!concurrent || prev != *last_producer_) return std::nullopt;
        for (std::size_t i = inst[k].begin; i < inst[k].end; ++i) {
            const auto& rec = trace_.records[i];
            if (!rec.address) continue;
            const Tick a = mem_.available_at(line_of(*rec.address));
            if (a > last_producer_start_) return std::max(a, last_producer_start_ + handoff());
        }
        return std::nullopt;
    }

    void run_instance(const std::vector<InstanceSpan>& inst, std::size_t k) {
        const auto& span = inst[k];
        const SegmentId seg = span.segment;
        const UnitId unit = policy_.unit_of(seg);
        auto& st = res_.segments[seg];
        ++st.instances;

        mark_ = now_;
        if (auto head = policy_.iteration_head(unit); head && *head == seg &&
                                                      epochs_[unit].instructions >= cfg_.epoch_length)
            close_epoch(unit, policy_.side_of(seg), now_);

        Side side = policy_.side_of(seg);
        Tick start = now_;
        if (prev_side_ && *prev_side_ != side) {
            start += handoff();
            ++res_.handoffs;
        }
        if (auto c = concurrent_start(inst, k)) start = std::min(start, *c);
        mem_.retire_before(std::min(start, now_));
        mark_ = start;

        load_routes(seg);
        pushes_.clear();

        const bool iteration_epochs = policy_.iteration_head(unit).has_value();
        const Tick tpi = cfg_.ticks_per_instr();
        std::priority_queue<Tick, std::vector<Tick>, std::greater<>> window;
        Tick t = start;
        auto drain = [&] {
            while (!window.empty()) {
                t = std::max(t, window.top());
                window.pop();
            }
        };

        for (std::size_t i = span.begin; i < span.end; ++i) {
            const auto& rec = trace_.records[i];
            t += tpi;
            auto& acc = epochs_[unit];
            ++acc.instructions;
            ++st.instructions;
            if (rec.address) {
                if (window.size() >= cfg_.mlp_window) {
                    t = std::max(t, window.top());
                    window.pop();
                }
                const LineAddr line = line_of(*rec.address);
                const bool write = rec.kind == InstrKind::store;
                const auto r = mem_.access(side, line, write, t);
                window.push(r.done);
                ++acc.mem_refs;
                ++st.mem_refs;
                acc.l1_misses += r.l1_miss;
                acc.llc_misses += r.llc_miss;
                st.l1_misses += r.l1_miss;
                st.llc_misses += r.llc_miss;
                res_.transfers.exposed_ticks += r.waited;
                if (write && consumers_.count(rec.pc)) {
                    auto it = open_.find(rec.pc);
                    if (it != open_.end() && it->second != line) push(rec.pc, it->second, side, t);
                    open_[rec.pc] = line;
                }
            }
            if (!iteration_epochs && acc.instructions >= cfg_.epoch_length) {
                close_epoch(unit, side, t);
                load_routes(seg);
                const Side next = policy_.side_of(seg);
                if (next != side) {
                    flush_open(side, t);
                    drain();
                    t += handoff();
                    ++res_.handoffs;
                    side = next;
                    mark_ = t;
                }
            }
        }
        flush_open(side, t);
        drain();

        epochs_[unit].ticks += t - mark_;
        st.ticks += t - start;
        res_.instructions += span.end - span.begin;
        for (const auto& p : pushes_) {
            const Tick overlap_end = std::min(p.arrival, t);
            if (overlap_end > p.enqueued) res_.transfers.hidden_ticks += overlap_end - p.enqueued;
        }
        if (!pushes_.empty()) {
            last_producer_ = seg;
            last_producer_start_ = start;
        } else {
            last_producer_.reset();
        }
        now_ = std::max(now_, t);
        prev_side_ = side;
    }

    const DynamicTrace& trace_;
    PlacementPolicy& policy_;
    MachineConfig cfg_;
    MemorySystem mem_;
    SimResult res_;
    Tick now_ = 0;
    Tick mark_ = 0;
    std::optional<Side> prev_side_;
    std::map<UnitId, EpochStats> epochs_;
    std::map<Pc, SegmentId> consumers_;  // generator pcs of the running instance
    std::map<Pc, LineAddr> open_;
    std::vector<Push> pushes_;
    std::optional<SegmentId> last_producer_;
    Tick last_producer_start_ = 0;
};

}  // namespace

SimResult simulate(const DynamicTrace& trace, PlacementPolicy& policy, const MachineConfig& cfg, SimOptions opts) {
    cfg.validate();
    return Engine(trace, policy, cfg, opts).run();
}

std::string to_key_values(const SimResult& r) {
    std::ostringstream os;
    os << "total_cycles = " << r.total_cycles() << '\n'
       << "instructions = " << r.instructions << '\n'
       << "handoffs = " << r.handoffs << '\n'
       << "crossings = " << r.crossings << '\n'
       << "dram_reads = " << r.dram_reads << '\n'
       << "link_transfers = " << r.link_transfers << '\n'
       << "transfer.lines_moved = " << r.transfers.lines_moved << '\n'
       << "transfer.hidden_cycles = " << ticks_to_cycles(r.transfers.hidden_ticks) << '\n'
       << "transfer.exposed_cycles = " << ticks_to_cycles(r.transfers.exposed_ticks) << '\n'
       << "energy.l1_host = " << r.energy.l1_host << '\n'
       << "energy.l2 = " << r.energy.l2 << '\n'
       << "energy.llc = " << r.energy.llc << '\n'
       << "energy.l1_ndp = " << r.energy.l1_ndp << '\n'
       << "energy.dram_internal = " << r.energy.dram_internal << '\n'
       << "energy.logic_layer = " << r.energy.logic_layer << '\n'
       << "energy.serdes = " << r.energy.serdes << '\n'
       << "energy.total = " << r.energy.total() << '\n';
    for (const auto& [id, s] : r.segments) {
        const std::string p = "segment." + std::to_string(id) + ".";
        os << p << "cycles = " << s.cycles() << '\n'
           << p << "instructions = " << s.instructions << '\n'
           << p << "l1_misses = " << s.l1_misses << '\n'
           << p << "llc_misses = " << s.llc_misses << '\n';
    }
    return os.str();
}

std::string segments_csv(const SimResult& r) {
    std::ostringstream os;
    os << "segment,instances,cycles,instructions,mem_refs,l1_misses,llc_misses,ipc\n";
    for (const auto& [id, s] : r.segments) {
        char ipc[32];
        std::snprintf(ipc, sizeof ipc, "%.4f", s.ipc());
        os << id << ',' << s.instances << ',' << s.cycles() << ',' << s.instructions << ',' << s.mem_refs << ','
           << s.l1_misses << ',' << s.llc_misses << ',' << ipc << '\n';
    }
    return os.str();
}

std::map<SegmentId, SegmentTiming> oracle_segment_timing(const SegmentProgram& p, const ParamMap& params,
                                                         std::uint64_t seed, const MachineConfig& cfg) {
    const auto full = unroll_trace(p, params, seed);
    std::map<SegmentId, DynamicTrace> parts;
    for (const auto& s : p.segments) parts[s.id];
    for (const auto& r : full.records) parts[r.segment].records.push_back(r);

    std::map<SegmentId, SegmentTiming> out;
    for (const auto& [id, t] : parts) {
        SegmentTiming timing;
        for (Side s : {Side::host, Side::ndp}) {
            StaticPlacement place({{id, s}});
            const auto cycles = simulate(t, place, cfg).total_cycles();
            (s == Side::host ? timing.host_cycles : timing.ndp_cycles) = cycles;
        }
        timing.best = timing.ndp_cycles < timing.host_cycles ? Side::ndp : Side::host;
        out[id] = timing;
    }
    return out;
}

}  // namespace alp
