#include "alp/marshal.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace alp {

namespace {

// For each ordered pair of segment ids, the cluster that owns that transition.
std::map<std::pair<SegmentId, SegmentId>, std::uint32_t> forward_pairs(
    const std::vector<ClusterAnnotation>& clusters) {
    std::map<std::pair<SegmentId, SegmentId>, std::uint32_t> out;
    for (const auto& c : clusters) {
        if (c.kind == ClusterKind::producer_consumer) {
            out[{c.producer(), c.consumer()}] = c.id;
            continue;
        }
        for (std::size_t i = 0; i < c.members.size(); ++i)
            for (std::size_t j = i + 1; j < c.members.size(); ++j) out[{c.members[i], c.members[j]}] = c.id;
    }
    return out;
}

}  // namespace

GeneratorMap detect_generators(const SegmentProgram& p, const DynamicTrace& trace,
                               const std::vector<ClusterAnnotation>& clusters) {
    GeneratorMap gens;
    for (const auto& c : clusters) {
        gens[c.id];
        for (SegmentId m : c.members)
            if (!p.has_segment(m))
                throw InconsistentTrace("cluster " + std::to_string(c.id) + " names unknown segment " +
                                        std::to_string(m));
    }
    const auto pairs = forward_pairs(clusters);

    std::unordered_map<LineAddr, Pc> previous, current;
    std::unordered_set<LineAddr> read_here;
    std::optional<SegmentId> prev_seg;
    std::optional<SegmentId> cur_seg;
    const std::uint32_t* owner = nullptr;

    for (const auto& r : trace.records) {
        if (!cur_seg || r.segment != *cur_seg) {
            if (!p.has_segment(r.segment))
                throw InconsistentTrace("segment " + std::to_string(r.segment) + " not in program");
            previous = std::move(current);
            current.clear();
            read_here.clear();
            prev_seg = cur_seg;
            cur_seg = r.segment;
            owner = nullptr;
            if (prev_seg) {
                auto it = pairs.find({*prev_seg, *cur_seg});
                if (it != pairs.end()) owner = &it->second;
            }
        }
        if (!r.address) continue;
        const LineAddr line = line_of(*r.address);
        if (r.kind == InstrKind::load) {
            if (read_here.insert(line).second && owner) {
                auto w = previous.find(line);
                if (w != previous.end()) gens[*owner].insert(w->second);
            }
        } else if (r.kind == InstrKind::store) {
            current[line] = r.pc;
        }
    }
    return gens;
}

bool detect_concurrent_mode(const SegmentProgram& p, const ClusterAnnotation& c) {
    if (c.kind != ClusterKind::producer_consumer) return false;
    const auto& prod = p.segment(c.producer());
    const auto& cons = p.segment(c.consumer());

    std::set<std::string> written, read;
    for (const auto& in : prod.body)
        if (in.kind == InstrKind::store) written.insert(in.access->array);
    for (const auto& in : cons.body)
        if (in.kind == InstrKind::load) read.insert(in.access->array);
    std::set<std::string> shared;
    std::set_intersection(written.begin(), written.end(), read.begin(), read.end(),
                          std::inserter(shared, shared.end()));
    if (shared.empty()) return false;

    auto same_shape = [](const AccessSpec& a, const AccessSpec& b) {
        if (a.pattern != b.pattern || a.element_size != b.element_size) return false;
        return a.pattern == Pattern::sequential ? a.stride == b.stride : a.seed_role == b.seed_role;
    };
    for (const auto& array : shared) {
        const AccessSpec* first = nullptr;
        for (const auto* seg : {&prod, &cons}) {
            for (const auto& in : seg->body) {
                if (!in.access || in.access->array != array) continue;
                if (!first) first = &*in.access;
                else if (!same_shape(*first, *in.access)) return false;
            }
        }
    }
    return true;
}

std::vector<ClusterAnnotation> annotate_transfer(std::vector<ClusterAnnotation> clusters,
                                                 const GeneratorMap& generators,
                                                 const std::map<std::uint32_t, bool>& concurrent) {
    for (auto& c : clusters) {
        auto g = generators.find(c.id);
        c.generator_pcs = g == generators.end() ? std::set<Pc>{} : g->second;
        auto k = concurrent.find(c.id);
        c.concurrent = k != concurrent.end() && k->second;
        if (c.generator_pcs.empty()) {
            c.kind = ClusterKind::inseparable;
            c.roles.assign(c.members.size(), Role::inseparable);
            c.concurrent = false;
        }
    }
    return clusters;
}

std::vector<ClusterAnnotation> profile_clusters(const Workload& w, std::vector<ClusterAnnotation> clusters) {
    const auto trace = unroll_trace(w.program, w.profiling_params(), profiling_seed(w.seed));
    const auto gens = detect_generators(w.program, trace, clusters);
    std::map<std::uint32_t, bool> conc;
    for (const auto& c : clusters) conc[c.id] = detect_concurrent_mode(w.program, c);
    return annotate_transfer(std::move(clusters), gens, conc);
}

}  // namespace alp
