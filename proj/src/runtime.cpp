#include "alp/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace alp {

std::string_view to_string(BlockType b) {
    switch (b) {
        case BlockType::producer: return "producer";
        case BlockType::consumer: return "consumer";
        case BlockType::inseparable: return "inseparable";
        case BlockType::single: return "single";
    }
    return "?";
}

std::string_view to_string(TransferLeaf l) {
    switch (l) {
        case TransferLeaf::producer_ndp: return "producer_ndp";
        case TransferLeaf::both_ndp: return "both_ndp";
        case TransferLeaf::both_host: return "both_host";
        case TransferLeaf::consumer_ndp: return "consumer_ndp";
        case TransferLeaf::large_concurrent: return "large_concurrent";
        case TransferLeaf::large_host: return "large_host";
    }
    return "?";
}

std::string_view to_string(Action a) {
    switch (a) {
        case Action::stay: return "stay";
        case Action::offload: return "offload";
        case Action::rollback: return "rollback";
        case Action::transfer: return "transfer";
    }
    return "?";
}

std::uint64_t table_size(const TableGeometry& g) { return std::uint64_t{g.row_count} * kEntryBits; }

OffloadTable::OffloadTable(TableGeometry g) : geom_(g) {}

OffloadTableEntry& OffloadTable::touch(UnitId unit) {
    if (auto it = rows_.find(unit); it != rows_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second.second);
        return it->second.first;
    }
    if (geom_.row_count == 0) throw ConfigError("offload table has no rows");
    if (rows_.size() >= geom_.row_count) {
        rows_.erase(lru_.back());
        lru_.pop_back();
        ++evictions_;
    }
    lru_.push_front(unit);
    auto& row = rows_[unit];
    row.second = lru_.begin();
    row.first.id = static_cast<std::uint8_t>(unit & ((1u << kIdBits) - 1));
    return row.first;
}

const OffloadTableEntry* OffloadTable::find(UnitId unit) const {
    auto it = rows_.find(unit);
    return it == rows_.end() ? nullptr : &it->second.first;
}

std::uint8_t quantize_ratio(double v) {
    if (!(v > 0.0)) return 0;
    return static_cast<std::uint8_t>(std::min(15.0, std::floor(v * 16.0)));
}

std::uint8_t quantize_ipc(double ipc, std::uint32_t issue_width) {
    if (!(ipc > 0.0) || issue_width == 0) return 0;
    return static_cast<std::uint8_t>(std::min(15.0, std::floor(ipc * 16.0 / issue_width)));
}

double miss_quotient(const EpochStats& s) {
    return s.l1_misses == 0 ? 0.0 : static_cast<double>(s.llc_misses) / static_cast<double>(s.l1_misses);
}

OffloadTableEntry monitor_epoch(const EpochStats& s, OffloadTableEntry e, std::uint32_t issue_width) {
    const auto ipc = quantize_ipc(s.ipc(), issue_width);
    if (s.side == Side::host) {
        e.l1llc_ratio = quantize_ratio(miss_quotient(s));
        e.ipc_host = ipc;
        ++e.host_epochs;
    } else {
        e.ipc_ndp = ipc;
        ++e.ndp_epochs;
    }
    return e;
}

Side decide_offload(OffloadTableEntry& e, std::uint8_t offload_level) {
    if (e.host_epochs == 0) throw NoHistory("unit " + std::to_string(e.id) + " has no host epoch");
    e.decision = e.l1llc_ratio >= offload_level ? Side::ndp : Side::host;
    return e.decision;
}

Rollback check_rollback(const OffloadTableEntry& e) {
    if (e.decision != Side::ndp || e.ndp_epochs == 0)
        throw NoHistory("unit " + std::to_string(e.id) + " has no NDP epoch");
    return e.ipc_ndp < e.ipc_host ? Rollback::migrate_back : Rollback::stay;
}

namespace {

bool intensive(const EpochStats& s, const MachineConfig& cfg) {
    EpochStats host = s;
    host.side = Side::host;
    auto e = monitor_epoch(host, OffloadTableEntry{}, cfg.issue_width);
    return decide_offload(e, cfg.offload_level) == Side::ndp;
}

}  // namespace

TransferMapping map_transfer_cluster(const ClusterAnnotation& c, std::uint64_t inter_data_bytes,
                                     const MachineConfig& cfg, const EpochStats& producer_profile,
                                     const EpochStats& consumer_profile) {
    if (c.kind != ClusterKind::producer_consumer || c.members.size() != 2)
        throw NotTransferCluster("cluster " + std::to_string(c.id) + " is not a producer/consumer pair");
    if (c.generator_pcs.empty())
        throw NotTransferCluster("cluster " + std::to_string(c.id) + " has no generator instructions");

    const bool prod = intensive(producer_profile, cfg);
    TransferMapping m;
    if (inter_data_bytes < cfg.llc.size_bytes) {
        const bool cons = intensive(consumer_profile, cfg);
        if (prod && !cons) m = {Side::ndp, Side::host, true, TransferLeaf::producer_ndp};
        else if (prod && cons) m = {Side::ndp, Side::ndp, false, TransferLeaf::both_ndp};
        else if (!prod && !cons) m = {Side::host, Side::host, false, TransferLeaf::both_host};
        else m = {Side::host, Side::ndp, true, TransferLeaf::consumer_ndp};
    } else if (prod && c.concurrent) {
        m = {Side::ndp, Side::host, true, TransferLeaf::large_concurrent};
    } else {
        m = {Side::host, Side::host, false, TransferLeaf::large_host};
    }
    return m;
}

InseparableMapping map_inseparable(const ClusterAnnotation& c, std::uint64_t inter_data_bytes,
                                   const MachineConfig& cfg, const std::map<SegmentId, EpochStats>& member_stats) {
    InseparableMapping out;
    out.aggregated = inter_data_bytes <= cfg.llc.size_bytes;
    if (!out.aggregated) {
        for (SegmentId m : c.members) {
            auto it = member_stats.find(m);
            out.sides[m] = it != member_stats.end() && intensive(it->second, cfg) ? Side::ndp : Side::host;
        }
        return out;
    }
    EpochStats sum;
    for (SegmentId m : c.members) {
        auto it = member_stats.find(m);
        if (it == member_stats.end()) continue;
        sum.instructions += it->second.instructions;
        sum.ticks += it->second.ticks;
        sum.mem_refs += it->second.mem_refs;
        sum.l1_misses += it->second.l1_misses;
        sum.llc_misses += it->second.llc_misses;
    }
    const Side s = intensive(sum, cfg) ? Side::ndp : Side::host;
    for (SegmentId m : c.members) out.sides[m] = s;
    return out;
}

std::uint64_t inter_data_bytes(const SegmentProgram& p, const ParamMap& params, const std::set<SegmentId>& from,
                               const std::set<SegmentId>& to) {
    std::set<std::string> stored, loaded;
    for (const auto& seg : p.segments) {
        for (const auto& ins : seg.body) {
            if (!ins.access) continue;
            if (ins.kind == InstrKind::store && from.count(seg.id)) stored.insert(ins.access->array);
            if (ins.kind == InstrKind::load && to.count(seg.id)) loaded.insert(ins.access->array);
        }
    }
    const auto layout = layout_arrays(p, params);
    std::uint64_t bytes = 0;
    for (const auto& a : stored)
        if (loaded.count(a)) bytes += layout.bytes(a);
    return bytes;
}

OffloadPackage make_offload_package(const SegmentProgram& p, const LivenessMap& live,
                                    const std::vector<SegmentId>& members) {
    OffloadPackage pkg;
    if (members.empty()) return pkg;
    const auto& first = p.segment(members.front());
    if (!first.body.empty()) pkg.start_pc = first.body.front().pc;
    pkg.live_ins = aggregate_liveness(p, live, {members.begin(), members.end()}).reg_in;
    return pkg;
}

std::string decision_log_csv(const std::vector<DecisionRecord>& log) {
    std::ostringstream os;
    os << "epoch,unit,side,quotient_level,ipc_host_level,ipc_ndp_level,action\n";
    for (const auto& r : log)
        os << r.epoch << ',' << r.unit << ',' << to_string(r.side) << ',' << int{r.quotient_level} << ','
           << int{r.ipc_host_level} << ',' << int{r.ipc_ndp_level} << ',' << to_string(r.action) << '\n';
    return os.str();
}

namespace {

class FirstEpochRecorder : public PlacementPolicy {
  public:
    Side side_of(SegmentId) const override { return Side::host; }
    void on_epoch(const EpochStats& s, Tick) override { first.try_emplace(s.unit, s); }
    std::map<SegmentId, EpochStats> first;
};

}  // namespace

std::map<SegmentId, EpochStats> first_host_epochs(const DynamicTrace& trace, const MachineConfig& cfg) {
    FirstEpochRecorder rec;
    simulate(trace, rec, cfg);
    return rec.first;
}

AlpPolicy::AlpPolicy(AlpInputs in, const MachineConfig& cfg)
    : cfg_(cfg),
      program_(in.program),
      consumer_profiles_(std::move(in.consumer_profiles)),
      table_(TableGeometry{static_cast<std::uint32_t>(cfg.table_rows)}) {
    if (!program_) throw ParameterError("policy needs a program");
    const auto& p = *program_;
    live_ = liveness(p);

    auto add_unit = [&](UnitId id, std::vector<SegmentId> members, BlockType type,
                        std::optional<SegmentId> head = std::nullopt, std::uint8_t ratio = 0) {
        Unit u;
        u.members = std::move(members);
        u.type = type;
        u.head = head;
        u.ratio = ratio;
        for (SegmentId s : u.members) {
            unit_of_[s] = id;
            sides_[s] = Side::host;
        }
        units_[id] = std::move(u);
    };

    for (const auto& c : in.clusters) {
        const std::set<SegmentId> members(c.members.begin(), c.members.end());
        if (c.kind == ClusterKind::producer_consumer && !c.generator_pcs.empty()) {
            const SegmentId prod = c.producer(), cons = c.consumer();
            inter_bytes_[c.id] = inter_data_bytes(p, in.params, {prod}, {cons});
            transfer_clusters_[prod] = c;
            add_unit(prod, {prod}, BlockType::producer, std::nullopt, c.ratio_level);
            add_unit(cons, {cons}, BlockType::consumer, std::nullopt, c.ratio_level);
            continue;
        }
        const auto bytes = inter_data_bytes(p, in.params, members, members);
        inter_bytes_[c.id] = bytes;
        if (bytes <= cfg_.llc.size_bytes) {
            add_unit(kClusterUnitBase + c.id, c.members, BlockType::inseparable, c.members.front(), c.ratio_level);
        } else {
            for (SegmentId m : c.members)
                add_unit(m, {m}, BlockType::inseparable, std::nullopt, c.ratio_level);
        }
    }
    for (const auto& seg : p.segments)
        if (!unit_of_.count(seg.id)) add_unit(seg.id, {seg.id}, BlockType::single);
}

Side AlpPolicy::side_of(SegmentId s) const {
    auto it = sides_.find(s);
    if (it == sides_.end()) throw PlacementGap("segment " + std::to_string(s) + " is not in the program");
    return it->second;
}

UnitId AlpPolicy::unit_of(SegmentId s) const {
    auto it = unit_of_.find(s);
    return it == unit_of_.end() ? s : it->second;
}

std::optional<SegmentId> AlpPolicy::iteration_head(UnitId u) const {
    auto it = units_.find(u);
    return it == units_.end() ? std::nullopt : it->second.head;
}

void AlpPolicy::set_side(UnitId u, Side s) {
    auto& unit = units_.at(u);
    for (SegmentId m : unit.members) sides_[m] = s;
    if (s == Side::ndp) packages_.push_back(make_offload_package(*program_, live_, unit.members));
}

Action AlpPolicy::first_decision(UnitId u, OffloadTableEntry& e, const EpochStats& s) {
    auto& unit = this->unit(u);
    if (unit.type == BlockType::producer) {
        const auto& c = transfer_clusters_.at(u);
        const SegmentId cons = c.consumer();
        auto prof = consumer_profiles_.find(cons);
        const EpochStats consumer_profile = prof == consumer_profiles_.end() ? EpochStats{} : prof->second;
        const auto m = map_transfer_cluster(c, inter_bytes_.at(c.id), cfg_, s, consumer_profile);
        mappings_[c.id] = m;
        e.decision = m.producer;
        if (m.producer == Side::ndp) set_side(u, Side::ndp);
        if (m.consumer == Side::ndp) set_side(cons, Side::ndp);
        unit.phase = m.producer == Side::ndp ? Phase::trial : Phase::settled;
        auto& consumer = this->unit(cons);
        consumer.phase = m.consumer == Side::ndp ? Phase::trial : Phase::settled;
        consumer.profiled_ipc = quantize_ipc(consumer_profile.ipc(), cfg_.issue_width);
        if (m.transfer)
            for (Pc pc : c.generator_pcs) plan_[pc] = TransferRoute{u, cons, c.concurrent};
        if (m.transfer) return Action::transfer;
        return m.producer == Side::ndp || m.consumer == Side::ndp ? Action::offload : Action::stay;
    }
    if (unit.type == BlockType::consumer) return Action::stay;  // placed with its producer
    const Side side = decide_offload(e, cfg_.offload_level);
    if (side == Side::host) {
        unit.phase = Phase::settled;
        return Action::stay;
    }
    set_side(u, Side::ndp);
    unit.phase = Phase::trial;
    return Action::offload;
}

void AlpPolicy::on_epoch(const EpochStats& s, Tick) {
    auto& unit = this->unit(s.unit);
    auto& e = table_.touch(s.unit);
    e.block_type = unit.type;
    e.ratio = unit.ratio;
    if (e.host_epochs == 0 && unit.profiled_ipc) e.ipc_host = *unit.profiled_ipc;
    e = monitor_epoch(s, e, cfg_.issue_width);

    Action action = Action::stay;
    switch (unit.phase) {
        case Phase::profiling:
            if (s.side == Side::host) action = first_decision(s.unit, e, s);
            break;
        case Phase::trial:
            if (s.side == Side::ndp) {
                unit.phase = Phase::settled;
                e.decision = Side::ndp;
                if (check_rollback(e) == Rollback::migrate_back) {
                    e.decision = Side::host;
                    set_side(s.unit, Side::host);
                    action = Action::rollback;
                }
            }
            break;
        case Phase::settled:
            break;
    }
    log_.push_back({epoch_seq_++, s.unit, s.side, e.l1llc_ratio, e.ipc_host, e.ipc_ndp, action});
}

}  // namespace alp
