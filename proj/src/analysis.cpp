#include "alp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "alp/ir_io.hpp"

namespace alp {

LivenessMap liveness(const SegmentProgram& p) {
    std::map<SegmentId, std::set<Reg>> gen, kill;
    for (const auto& s : p.segments) {
        auto& g = gen[s.id];
        auto& k = kill[s.id];
        for (const auto& in : s.body) {
            for (Reg r : in.uses)
                if (!k.count(r)) g.insert(r);
            k.insert(in.defs.begin(), in.defs.end());
        }
    }

    LivenessMap live;
    for (const auto& s : p.segments) live[s.id];
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = p.segments.rbegin(); it != p.segments.rend(); ++it) {
            const SegmentId id = it->id;
            std::set<Reg> out;
            for (SegmentId succ : p.successors(id)) {
                const auto& in = live[succ].reg_in;
                out.insert(in.begin(), in.end());
            }
            std::set<Reg> in = gen[id];
            for (Reg r : out)
                if (!kill[id].count(r)) in.insert(r);
            auto& l = live[id];
            if (in != l.reg_in || out != l.reg_out) {
                l.reg_in = std::move(in);
                l.reg_out = std::move(out);
                changed = true;
            }
        }
    }
    return live;
}

double connectivity(const LivenessSummary& a, const LivenessSummary& b) {
    std::size_t inter = 0;
    for (Reg r : a.reg_out) inter += b.reg_in.count(r);
    const std::size_t da = a.reg_in.size() + a.reg_out.size();
    const std::size_t db = b.reg_in.size() + b.reg_out.size();
    if (inter == 0) return 0.0;
    if (da == 0 || db == 0) throw DegenerateSegments("shared registers with an empty summary");
    const double n = static_cast<double>(inter);
    return std::max(n / static_cast<double>(da), n / static_cast<double>(db));
}

std::string_view to_string(ClusterKind k) {
    return k == ClusterKind::producer_consumer ? "producer_consumer" : "inseparable";
}

std::string_view to_string(Role r) {
    switch (r) {
        case Role::producer: return "producer";
        case Role::consumer: return "consumer";
        case Role::inseparable: return "inseparable";
    }
    return "?";
}

SegmentId ClusterAnnotation::producer() const {
    for (std::size_t i = 0; i < members.size(); ++i)
        if (roles[i] == Role::producer) return members[i];
    throw NotTransferCluster("cluster " + std::to_string(id) + " has no producer");
}

SegmentId ClusterAnnotation::consumer() const {
    for (std::size_t i = 0; i < members.size(); ++i)
        if (roles[i] == Role::consumer) return members[i];
    throw NotTransferCluster("cluster " + std::to_string(id) + " has no consumer");
}

bool ClusterAnnotation::contains(SegmentId s) const {
    return std::find(members.begin(), members.end(), s) != members.end();
}

std::map<SegmentId, std::size_t> topo_rank(const SegmentProgram& p) {
    std::map<SegmentId, std::size_t> rank;
    if (p.segments.empty()) return rank;
    std::set<SegmentId> seen;
    std::vector<SegmentId> post;
    std::function<void(SegmentId)> dfs = [&](SegmentId s) {
        seen.insert(s);
        const auto succ = p.successors(s);
        for (auto it = succ.rbegin(); it != succ.rend(); ++it)
            if (!seen.count(*it)) dfs(*it);
        post.push_back(s);
    };
    dfs(p.segments.front().id);
    // Unreachable segments cannot exist in a built program, but keep ranks total.
    for (const auto& s : p.segments)
        if (!seen.count(s.id)) dfs(s.id);
    std::size_t r = 0;
    for (auto it = post.rbegin(); it != post.rend(); ++it) rank[*it] = r++;
    return rank;
}

LivenessSummary aggregate_liveness(const SegmentProgram& p, const LivenessMap& live,
                                   const std::set<SegmentId>& members) {
    std::set<Reg> produced;
    for (SegmentId m : members)
        for (const auto& in : p.segment(m).body) produced.insert(in.defs.begin(), in.defs.end());

    LivenessSummary agg;
    for (SegmentId m : members) {
        const auto preds = p.predecessors(m);
        const bool entry = preds.empty() || std::any_of(preds.begin(), preds.end(),
                                                        [&](SegmentId q) { return !members.count(q); });
        for (Reg r : live.at(m).reg_in)
            if (entry || !produced.count(r)) agg.reg_in.insert(r);
        for (SegmentId t : p.successors(m))
            if (!members.count(t)) agg.reg_out.insert(live.at(t).reg_in.begin(), live.at(t).reg_in.end());
    }
    return agg;
}

std::uint8_t ratio_level_ceil(double r) {
    const double v = std::ceil(std::clamp(r, 0.0, 1.0) * 16.0);
    return static_cast<std::uint8_t>(std::min(15.0, v));
}

namespace {

using Part = std::set<SegmentId>;

std::size_t min_rank(const Part& c, const std::map<SegmentId, std::size_t>& rank) {
    std::size_t m = SIZE_MAX;
    for (SegmentId s : c) m = std::min(m, rank.at(s));
    return m;
}

ClusterAnnotation annotate(const SegmentProgram& p, const LivenessMap& live, const Part& part,
                           const std::map<SegmentId, std::size_t>& rank) {
    ClusterAnnotation a;
    a.members.assign(part.begin(), part.end());
    std::sort(a.members.begin(), a.members.end(),
              [&](SegmentId x, SegmentId y) { return rank.at(x) < rank.at(y); });

    const auto succ0 = p.successors(a.members.front());
    const bool pair = a.members.size() == 2 &&
                      std::find(succ0.begin(), succ0.end(), a.members[1]) != succ0.end();
    a.kind = pair ? ClusterKind::producer_consumer : ClusterKind::inseparable;
    a.roles = pair ? std::vector<Role>{Role::producer, Role::consumer}
                   : std::vector<Role>(a.members.size(), Role::inseparable);

    std::set<Reg> passing, all;
    for (SegmentId m : a.members) {
        const auto& l = live.at(m);
        all.insert(l.reg_in.begin(), l.reg_in.end());
        all.insert(l.reg_out.begin(), l.reg_out.end());
        for (SegmentId t : p.successors(m)) {
            if (!part.count(t)) continue;
            for (Reg r : l.reg_out)
                if (live.at(t).reg_in.count(r)) passing.insert(r);
        }
    }
    a.ratio_level = all.empty() ? 0 : ratio_level_ceil(static_cast<double>(passing.size()) / all.size());
    return a;
}

}  // namespace

std::vector<ClusterAnnotation> cluster(const SegmentProgram& p, const LivenessMap& live, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ParameterError("threshold must be in (0,1]");
    const auto rank = topo_rank(p);

    std::vector<Part> parts;
    for (const auto& s : p.segments) parts.push_back({s.id});
    auto part_of = [&](SegmentId s) {
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (parts[i].count(s)) return i;
        throw InconsistentTrace("segment " + std::to_string(s) + " missing from partition");
    };
    auto merge = [&](std::size_t i, std::size_t j) {
        parts[i].insert(parts[j].begin(), parts[j].end());
        parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(j));
    };

    bool changed = true;
    while (changed) {
        changed = false;

        for (const auto& d : p.divergences) {
            bool tight = false;
            for (SegmentId arm : d.arms)
                tight = tight || connectivity(live.at(d.source), live.at(arm)) > threshold ||
                        connectivity(live.at(arm), live.at(d.join)) > threshold;
            if (!tight) continue;
            std::vector<SegmentId> group = d.arms;
            group.push_back(d.source);
            group.push_back(d.join);
            for (SegmentId s : group) {
                const std::size_t i = part_of(d.source), j = part_of(s);
                if (i != j) {
                    merge(std::min(i, j), std::max(i, j));
                    changed = true;
                }
            }
        }

        std::vector<std::size_t> order(parts.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return min_rank(parts[x], rank) < min_rank(parts[y], rank); });

        for (std::size_t ci : order) {
            std::set<std::size_t> succ;
            for (SegmentId m : parts[ci])
                for (SegmentId t : p.successors(m))
                    if (!parts[ci].count(t)) succ.insert(part_of(t));
            std::vector<std::size_t> cand(succ.begin(), succ.end());
            std::sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) {
                const auto rx = min_rank(parts[x], rank), ry = min_rank(parts[y], rank);
                return rx != ry ? rx < ry : *parts[x].begin() < *parts[y].begin();
            });
            const auto agg_c = aggregate_liveness(p, live, parts[ci]);
            for (std::size_t di : cand) {
                if (connectivity(agg_c, aggregate_liveness(p, live, parts[di])) > threshold) {
                    merge(std::min(ci, di), std::max(ci, di));
                    changed = true;
                    break;
                }
            }
            if (changed) break;
        }
    }

    std::vector<Part> kept;
    for (auto& c : parts)
        if (c.size() >= 2) kept.push_back(c);
    std::sort(kept.begin(), kept.end(),
              [&](const Part& x, const Part& y) { return min_rank(x, rank) < min_rank(y, rank); });
    if (kept.size() > kMaxClusterId + 1) throw ParameterError("more clusters than the 6-bit id space");

    std::vector<ClusterAnnotation> out;
    for (const auto& c : kept) {
        out.push_back(annotate(p, live, c, rank));
        out.back().id = static_cast<std::uint32_t>(out.size() - 1);
    }
    return out;
}

// -- sidecar format ---------------------------------------------------------

namespace {

template <class T, class F>
std::string join(const T& xs, F f) {
    std::string s;
    for (const auto& x : xs) {
        if (!s.empty()) s += ',';
        s += f(x);
    }
    return s.empty() ? "-" : s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    if (s == "-") return out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

Role role_from_string(std::string_view s) {
    if (s == "producer") return Role::producer;
    if (s == "consumer") return Role::consumer;
    if (s == "inseparable") return Role::inseparable;
    throw ParseError("unknown role '" + std::string(s) + "'");
}

}  // namespace

std::string serialize_clusters(const std::vector<ClusterAnnotation>& cs) {
    std::ostringstream os;
    os << kClusterHeader << '\n';
    for (const auto& c : cs) {
        os << "cluster " << c.id << " kind=" << to_string(c.kind)
           << " members=" << join(c.members, [](SegmentId s) { return std::to_string(s); })
           << " ratio=" << int{c.ratio_level}
           << " roles=" << join(c.roles, [](Role r) { return std::string(to_string(r)); })
           << " concurrent=" << (c.concurrent ? 1 : 0)
           << " generators=" << join(c.generator_pcs, [](Pc pc) { return hex(pc); }) << '\n';
    }
    return os.str();
}

std::vector<ClusterAnnotation> parse_clusters(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line != kClusterHeader) throw ParseError("missing ALPCLSTR v1 header");
    std::vector<ClusterAnnotation> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string word;
        ClusterAnnotation c;
        try {
            ls >> word;
            if (word != "cluster") throw ParseError("expected 'cluster'");
            std::string id;
            ls >> id;
            c.id = static_cast<std::uint32_t>(parse_u64(id));
            std::set<std::string> seen;
            while (ls >> word) {
                const auto eq = word.find('=');
                if (eq == std::string::npos) throw ParseError("expected key=value");
                const std::string key = word.substr(0, eq), val = word.substr(eq + 1);
                seen.insert(key);
                if (key == "kind") {
                    if (val == "producer_consumer") c.kind = ClusterKind::producer_consumer;
                    else if (val == "inseparable") c.kind = ClusterKind::inseparable;
                    else throw ParseError("unknown kind '" + val + "'");
                } else if (key == "members") {
                    for (const auto& m : split(val, ',')) c.members.push_back(static_cast<SegmentId>(parse_u64(m)));
                } else if (key == "ratio") {
                    const auto v = parse_u64(val);
                    if (v > 15) throw ParseError("ratio level out of range");
                    c.ratio_level = static_cast<std::uint8_t>(v);
                } else if (key == "roles") {
                    for (const auto& r : split(val, ',')) c.roles.push_back(role_from_string(r));
                } else if (key == "concurrent") {
                    if (val != "0" && val != "1") throw ParseError("concurrent must be 0 or 1");
                    c.concurrent = val == "1";
                } else if (key == "generators") {
                    for (const auto& g : split(val, ',')) c.generator_pcs.insert(parse_u64(g));
                } else {
                    throw ParseError("unknown key '" + key + "'");
                }
            }
            for (const char* k : {"kind", "members", "ratio", "roles"})
                if (!seen.count(k)) throw ParseError(std::string("missing ") + k);
            if (c.roles.size() != c.members.size()) throw ParseError("roles and members differ in length");
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace alp
