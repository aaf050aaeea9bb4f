#include "alp/ir.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

namespace alp {

std::string_view to_string(InstrKind k) {
    switch (k) {
        case InstrKind::compute: return "compute";
        case InstrKind::load: return "load";
        case InstrKind::store: return "store";
        case InstrKind::branch: return "branch";
    }
    return "?";
}

InstrKind instr_kind_from_string(std::string_view s) {
    if (s == "compute") return InstrKind::compute;
    if (s == "load") return InstrKind::load;
    if (s == "store") return InstrKind::store;
    if (s == "branch") return InstrKind::branch;
    throw ParseError("unknown instruction kind '" + std::string(s) + "'");
}

// -- SegmentProgram accessors -------------------------------------------------

std::size_t SegmentProgram::index_of(SegmentId id) const {
    for (std::size_t i = 0; i < segments.size(); ++i)
        if (segments[i].id == id) return i;
    throw MalformedSpec("unknown segment " + std::to_string(id));
}

bool SegmentProgram::has_segment(SegmentId id) const {
    return std::any_of(segments.begin(), segments.end(),
                       [id](const Segment& s) { return s.id == id; });
}

const Segment& SegmentProgram::segment(SegmentId id) const { return segments[index_of(id)]; }

std::vector<SegmentId> SegmentProgram::successors(SegmentId id) const {
    std::vector<SegmentId> out;
    for (const auto& e : edges)
        if (e.from == id) out.push_back(e.to);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<SegmentId> SegmentProgram::predecessors(SegmentId id) const {
    std::vector<SegmentId> out;
    for (const auto& e : edges)
        if (e.to == id) out.push_back(e.from);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

const ArrayDecl& SegmentProgram::array(const std::string& id) const {
    for (const auto& a : arrays)
        if (a.id == id) return a;
    throw MalformedSpec("unknown array '" + id + "'");
}

const AbstractInstr* SegmentProgram::find_instr(Pc pc) const {
    for (const auto& s : segments)
        for (const auto& i : s.body)
            if (i.pc == pc) return &i;
    return nullptr;
}

SegmentId SegmentProgram::segment_of_pc(Pc pc) const {
    for (const auto& s : segments)
        for (const auto& i : s.body)
            if (i.pc == pc) return s.id;
    throw MalformedSpec("pc not in program");
}

ParamMap Workload::profiling_params() const {
    ParamMap p = params;
    for (const auto& [k, v] : profile_params) p[k] = v;
    return p;
}

// -- expressions --------------------------------------------------------------

namespace {

std::vector<std::string> split_product(const std::string& expr) {
    std::vector<std::string> terms;
    std::string cur;
    for (char c : expr) {
        if (c == '*') {
            terms.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    terms.push_back(cur);
    return terms;
}

bool is_integer(const std::string& t) {
    return !t.empty() && std::all_of(t.begin(), t.end(),
                                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_identifier(const std::string& t) {
    if (t.empty() || std::isdigit(static_cast<unsigned char>(t[0]))) return false;
    return std::all_of(t.begin(), t.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

void check_expr_syntax(const std::string& expr, const std::string& where) {
    for (const auto& t : split_product(expr))
        if (!is_integer(t) && !is_identifier(t))
            throw MalformedSpec("bad expression '" + expr + "' in " + where);
}

}  // namespace

std::int64_t eval_expr(const std::string& expr, const ParamMap& params) {
    std::int64_t v = 1;
    for (const auto& t : split_product(expr)) {
        if (is_integer(t)) {
            v *= std::stoll(t);
        } else if (is_identifier(t)) {
            auto it = params.find(t);
            if (it == params.end()) throw UnboundParameter("'" + t + "'");
            v *= it->second;
        } else {
            throw MalformedSpec("bad expression '" + expr + "'");
        }
    }
    return v;
}

// -- validation ---------------------------------------------------------------

namespace {

std::set<SegmentId> reachable_from(const SegmentProgram& p, SegmentId start,
                                   std::optional<SegmentId> blocked = std::nullopt) {
    std::set<SegmentId> seen{start};
    std::deque<SegmentId> work{start};
    while (!work.empty()) {
        SegmentId s = work.front();
        work.pop_front();
        for (SegmentId t : p.successors(s)) {
            if (blocked && t == *blocked) continue;
            if (seen.insert(t).second) work.push_back(t);
        }
    }
    return seen;
}

void validate_instr(const SegmentProgram& p, const Segment& s, const AbstractInstr& in) {
    const std::string where = "segment " + std::to_string(s.id);
    if (in.is_memory() != in.access.has_value())
        throw MalformedSpec("load/store must carry exactly one access (" + where + ")");
    if (!in.access) return;
    const auto& a = *in.access;
    const auto& decl = p.array(a.array);
    if (a.element_size != 1 && a.element_size != 2 && a.element_size != 4 && a.element_size != 8)
        throw MalformedSpec("element size must be 1, 2, 4 or 8 (" + where + ")");
    if (a.element_size != decl.element_size)
        throw MalformedSpec("element size disagrees with array '" + a.array + "'");
    if (a.pattern == Pattern::sequential && a.stride == 0)
        throw MalformedSpec("zero stride (" + where + ")");
    if (a.pattern == Pattern::random && a.seed_role.empty())
        throw MalformedSpec("random access needs a seed role (" + where + ")");
}

void check_dangling_uses(const SegmentProgram& p) {
    // Forward may-reach of definitions; a segment body loops, so any def in
    // its own body also reaches its uses.
    std::map<SegmentId, std::set<Reg>> reach_in;
    std::map<SegmentId, std::set<Reg>> body_defs;
    for (const auto& s : p.segments) {
        for (const auto& i : s.body) body_defs[s.id].insert(i.defs.begin(), i.defs.end());
        reach_in[s.id] = {};
    }
    reach_in[p.segments.front().id] = p.live_in;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& s : p.segments) {
            std::set<Reg> out = reach_in[s.id];
            out.insert(body_defs[s.id].begin(), body_defs[s.id].end());
            for (SegmentId t : p.successors(s.id)) {
                auto& in = reach_in[t];
                std::size_t before = in.size();
                in.insert(out.begin(), out.end());
                changed |= in.size() != before;
            }
        }
    }
    for (const auto& s : p.segments)
        for (const auto& i : s.body)
            for (Reg r : i.uses)
                if (!reach_in[s.id].count(r) && !body_defs[s.id].count(r) && !p.live_in.count(r))
                    throw MalformedSpec("dangling use of r" + std::to_string(r) + " in segment " +
                                        std::to_string(s.id));
}

}  // namespace

SegmentProgram build_program(SegmentProgram p) {
    if (p.segments.empty()) throw MalformedSpec("empty segment list");

    std::set<SegmentId> ids;
    std::set<Pc> pcs;
    for (const auto& s : p.segments) {
        if (!ids.insert(s.id).second) throw MalformedSpec("duplicate segment id " + std::to_string(s.id));
        if (s.body.empty()) throw MalformedSpec("empty body in segment " + std::to_string(s.id));
        if (s.trip.empty()) throw MalformedSpec("missing trip count in segment " + std::to_string(s.id));
        check_expr_syntax(s.trip, "segment " + std::to_string(s.id));
        for (const auto& i : s.body)
            if (!pcs.insert(i.pc).second) throw MalformedSpec("duplicate pc");
    }

    std::set<std::string> array_ids;
    for (const auto& a : p.arrays) {
        if (!array_ids.insert(a.id).second) throw MalformedSpec("duplicate array '" + a.id + "'");
        if (a.element_size != 1 && a.element_size != 2 && a.element_size != 4 && a.element_size != 8)
            throw MalformedSpec("element size must be 1, 2, 4 or 8 for array '" + a.id + "'");
        check_expr_syntax(a.length, "array " + a.id);
    }
    for (const auto& s : p.segments)
        for (const auto& i : s.body) validate_instr(p, s, i);

    std::set<CfgEdge> seen_edges;
    for (const auto& e : p.edges) {
        if (!ids.count(e.from) || !ids.count(e.to)) throw MalformedSpec("edge references unknown segment");
        if (!seen_edges.insert(e).second) throw MalformedSpec("duplicate edge");
    }

    auto reach = reachable_from(p, p.segments.front().id);
    for (const auto& s : p.segments)
        if (!reach.count(s.id)) throw MalformedSpec("unreachable segment " + std::to_string(s.id));

    for (const auto& d : p.divergences) {
        if (!ids.count(d.source) || !ids.count(d.join) || d.arms.empty())
            throw MalformedSpec("malformed divergence group");
        for (SegmentId arm : d.arms) {
            if (!ids.count(arm) || !seen_edges.count({d.source, arm}))
                throw MalformedSpec("divergence arm not a successor of its source");
            if (!reachable_from(p, arm, d.source).count(d.join))
                throw MalformedSpec("divergence arm " + std::to_string(arm) + " does not reconverge at " +
                                    std::to_string(d.join));
        }
    }

    std::set<SegmentId> in_loop;
    for (const auto& l : p.loops) {
        if (l.members.empty() || l.repeat.empty()) throw MalformedSpec("empty loop region");
        check_expr_syntax(l.repeat, "loop");
        std::size_t first = p.index_of(l.members.front());
        for (std::size_t k = 0; k < l.members.size(); ++k) {
            if (first + k >= p.segments.size() || p.segments[first + k].id != l.members[k])
                throw MalformedSpec("loop members must be contiguous in declaration order");
            if (!in_loop.insert(l.members[k]).second) throw MalformedSpec("segment in two loops");
        }
    }

    check_dangling_uses(p);
    return p;
}

// -- trace ------------------------------------------------------------------------

std::vector<InstanceSpan> segment_instances(const DynamicTrace& trace) {
    std::vector<InstanceSpan> out;
    const auto& r = trace.records;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (out.empty() || r[i].segment != out.back().segment)
            out.push_back({r[i].segment, i, i + 1});
        else
            out.back().end = i + 1;
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t stream_seed(std::uint64_t seed, std::string_view array, std::string_view role) {
    std::string key(array);
    key += '/';
    key += role;
    return seed ^ fnv1a64(key);
}

std::uint64_t ArrayLayout::bytes(const std::string& id) const {
    return length.at(id) * element_size.at(id);
}

ArrayLayout layout_arrays(const SegmentProgram& p, const ParamMap& params) {
    ArrayLayout l;
    Addr next = kArrayBase;
    for (const auto& a : p.arrays) {
        std::int64_t len = eval_expr(a.length, params);
        if (len < 1) throw ParameterError("array '" + a.id + "' has length " + std::to_string(len));
        l.base[a.id] = next;
        l.length[a.id] = static_cast<std::uint64_t>(len);
        l.element_size[a.id] = a.element_size;
        Addr end = next + static_cast<Addr>(len) * a.element_size;
        next = (end + kArrayAlign - 1) / kArrayAlign * kArrayAlign;
    }
    return l;
}

namespace {

struct Phase {
    std::size_t first = 0;
    std::size_t count = 1;
    std::string repeat;  // empty: once
};

std::vector<Phase> phases(const SegmentProgram& p) {
    std::vector<Phase> out;
    for (std::size_t i = 0; i < p.segments.size();) {
        const LoopRegion* loop = nullptr;
        for (const auto& l : p.loops)
            if (l.members.front() == p.segments[i].id) loop = &l;
        if (loop) {
            out.push_back({i, loop->members.size(), loop->repeat});
            i += loop->members.size();
        } else {
            out.push_back({i, 1, {}});
            ++i;
        }
    }
    return out;
}

std::uint64_t nonneg(std::int64_t v, const std::string& what) {
    if (v < 0) throw ParameterError(what + " is negative");
    return static_cast<std::uint64_t>(v);
}

}  // namespace

std::uint64_t analytic_length(const SegmentProgram& p, const ParamMap& params) {
    std::uint64_t total = 0;
    for (const auto& ph : phases(p)) {
        std::uint64_t reps = ph.repeat.empty() ? 1 : nonneg(eval_expr(ph.repeat, params), "repeat");
        std::uint64_t per = 0;
        for (std::size_t k = 0; k < ph.count; ++k) {
            const auto& s = p.segments[ph.first + k];
            per += nonneg(eval_expr(s.trip, params), "trip") * s.body.size();
        }
        total += reps * per;
    }
    return total;
}

DynamicTrace unroll_trace(const SegmentProgram& p, const ParamMap& params, std::uint64_t seed) {
    // Bind everything up front so an unbound parameter fails before any work.
    for (const auto& s : p.segments) eval_expr(s.trip, params);
    for (const auto& l : p.loops) eval_expr(l.repeat, params);
    const ArrayLayout layout = layout_arrays(p, params);

    std::map<std::pair<std::string, std::string>, Lcg> streams;
    auto stream = [&](const AccessSpec& a) -> Lcg& {
        auto key = std::make_pair(a.array, a.seed_role);
        auto it = streams.find(key);
        if (it == streams.end())
            it = streams.emplace(key, Lcg(stream_seed(seed, a.array, a.seed_role))).first;
        return it->second;
    };

    DynamicTrace t;
    t.records.reserve(analytic_length(p, params));
    std::uint64_t seq = 0;
    for (const auto& ph : phases(p)) {
        std::uint64_t reps = ph.repeat.empty() ? 1 : nonneg(eval_expr(ph.repeat, params), "repeat");
        for (std::uint64_t r = 0; r < reps; ++r) {
            for (std::size_t k = 0; k < ph.count; ++k) {
                const auto& s = p.segments[ph.first + k];
                std::uint64_t trips = nonneg(eval_expr(s.trip, params), "trip");
                for (std::uint64_t it = 0; it < trips; ++it) {
                    for (const auto& in : s.body) {
                        TraceRecord rec{seq++, s.id, in.pc, in.kind, std::nullopt};
                        if (in.access) {
                            const auto& a = *in.access;
                            const std::uint64_t len = layout.length.at(a.array);
                            if (len == 0) throw ParameterError("access to empty array '" + a.array + "'");
                            std::uint64_t idx;
                            if (a.pattern == Pattern::sequential) {
                                const auto l = static_cast<std::int64_t>(len);
                                std::int64_t raw = static_cast<std::int64_t>(it % len) * (a.stride % l);
                                idx = static_cast<std::uint64_t>(((raw % l) + l) % l);
                            } else {
                                idx = stream(a).index(len);
                            }
                            rec.address = layout.base.at(a.array) + idx * a.element_size;
                        }
                        t.records.push_back(rec);
                    }
                }
            }
        }
    }
    return t;
}

}  // namespace alp
