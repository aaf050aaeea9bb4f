#include "alp/ir_io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace alp {

std::string hex(std::uint64_t v) {
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
    (void)ec;
    return "0x" + std::string(buf, end);
}

std::uint64_t parse_u64(std::string_view s) {
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        s.remove_prefix(2);
        base = 16;
    }
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError("bad integer '" + std::string(s) + "'");
    return v;
}

namespace {

std::int64_t parse_i64(std::string_view s) {
    bool neg = !s.empty() && s[0] == '-';
    if (neg) s.remove_prefix(1);
    auto v = static_cast<std::int64_t>(parse_u64(s));
    return neg ? -v : v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::vector<std::string_view> words(std::string_view s) {
    std::vector<std::string_view> out;
    for (auto w : split(s, ' '))
        if (!trim(w).empty()) out.push_back(trim(w));
    return out;
}

std::string join_regs(const std::set<Reg>& regs, char sep) {
    std::string out;
    for (Reg r : regs) {
        if (!out.empty()) out += sep;
        out += 'r' + std::to_string(r);
    }
    return out;
}

Reg parse_reg(std::string_view s) {
    if (s.empty() || s[0] != 'r') throw ParseError("bad register '" + std::string(s) + "'");
    return static_cast<Reg>(parse_u64(s.substr(1)));
}

std::set<Reg> parse_regs(std::string_view s, char sep) {
    std::set<Reg> out;
    for (auto w : split(s, sep))
        if (!trim(w).empty()) out.insert(parse_reg(trim(w)));
    return out;
}

std::string access_token(const AccessSpec& a) {
    std::string s = a.array + ':';
    if (a.pattern == Pattern::sequential)
        s += "seq:" + std::to_string(a.stride);
    else
        s += "random:" + a.seed_role;
    return s + ':' + std::to_string(a.element_size);
}

AccessSpec parse_access(std::string_view tok) {
    auto f = split(tok, ':');
    if (f.size() != 4) throw ParseError("bad access '" + std::string(tok) + "'");
    AccessSpec a;
    a.array = std::string(f[0]);
    if (f[1] == "seq") {
        a.pattern = Pattern::sequential;
        a.stride = parse_i64(f[2]);
    } else if (f[1] == "random") {
        a.pattern = Pattern::random;
        a.seed_role = std::string(f[2]);
    } else {
        throw ParseError("bad access pattern '" + std::string(f[1]) + "'");
    }
    a.element_size = static_cast<std::uint32_t>(parse_u64(f[3]));
    return a;
}

std::string ids_line(const std::vector<SegmentId>& ids) {
    std::string out;
    for (auto id : ids) {
        if (!out.empty()) out += ' ';
        out += std::to_string(id);
    }
    return out;
}

std::vector<SegmentId> parse_ids(std::string_view s) {
    std::vector<SegmentId> out;
    for (auto w : words(s)) out.push_back(static_cast<SegmentId>(parse_u64(w)));
    return out;
}

}  // namespace

std::string serialize_workload(const Workload& w) {
    std::ostringstream os;
    const auto& p = w.program;
    os << kProgramHeader << '\n';
    os << "name = " << w.name << '\n';
    os << "seed = " << w.seed << '\n';
    os << "[params]\n";
    for (const auto& [k, v] : w.params) os << k << " = " << v << '\n';
    if (!w.profile_params.empty()) {
        os << "[profile_params]\n";
        for (const auto& [k, v] : w.profile_params) os << k << " = " << v << '\n';
    }
    if (!p.live_in.empty()) os << "[live_in]\nregs = " << join_regs(p.live_in, ' ') << '\n';
    for (const auto& a : p.arrays)
        os << "[array " << a.id << "]\nlength = " << a.length << "\nelement_size = " << a.element_size << '\n';
    for (const auto& s : p.segments) {
        os << "[segment " << s.id << "]\ntrip = " << s.trip << '\n';
        for (const auto& in : s.body) {
            os << "instr = " << hex(in.pc) << ' ' << to_string(in.kind);
            if (!in.defs.empty()) os << " defs=" << join_regs(in.defs, ',');
            if (!in.uses.empty()) os << " uses=" << join_regs(in.uses, ',');
            if (in.access) os << " access=" << access_token(*in.access);
            os << '\n';
        }
    }
    if (!p.edges.empty()) {
        os << "[edges]\n";
        for (const auto& e : p.edges) os << "edge = " << e.from << ' ' << e.to << '\n';
    }
    for (const auto& l : p.loops)
        os << "[loop]\nmembers = " << ids_line(l.members) << "\nrepeat = " << l.repeat << '\n';
    for (const auto& d : p.divergences)
        os << "[divergence]\nsource = " << d.source << "\narms = " << ids_line(d.arms) << "\njoin = " << d.join
           << '\n';
    return os.str();
}

Workload parse_workload(std::string_view text) {
    Workload w;
    auto& p = w.program;
    auto lines = split(text, '\n');
    std::size_t i = 0;
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    if (i == lines.size() || trim(lines[i]) != kProgramHeader) throw ParseError("missing 'ALPIR v1' header");
    ++i;

    enum class Sec { top, params, profile, live_in, array, segment, edges, loop, divergence };
    Sec sec = Sec::top;
    for (std::size_t n = i; n < lines.size(); ++n) {
        auto line = trim(lines[n]);
        if (line.empty() || line[0] == '#') continue;
        const std::string at = " (line " + std::to_string(n + 1) + ")";
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("bad section" + at);
            auto hdr = words(line.substr(1, line.size() - 2));
            if (hdr.empty()) throw ParseError("empty section" + at);
            if (hdr[0] == "params") sec = Sec::params;
            else if (hdr[0] == "profile_params") sec = Sec::profile;
            else if (hdr[0] == "live_in") sec = Sec::live_in;
            else if (hdr[0] == "edges") sec = Sec::edges;
            else if (hdr[0] == "array" && hdr.size() == 2) {
                sec = Sec::array;
                p.arrays.push_back({std::string(hdr[1]), "", 8});
            } else if (hdr[0] == "segment" && hdr.size() == 2) {
                sec = Sec::segment;
                p.segments.push_back({static_cast<SegmentId>(parse_u64(hdr[1])), {}, ""});
            } else if (hdr[0] == "loop") {
                sec = Sec::loop;
                p.loops.emplace_back();
            } else if (hdr[0] == "divergence") {
                sec = Sec::divergence;
                p.divergences.emplace_back();
            } else {
                throw ParseError("unknown section '" + std::string(line) + "'" + at);
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key = value" + at);
        auto key = trim(line.substr(0, eq));
        auto val = trim(line.substr(eq + 1));
        switch (sec) {
            case Sec::top:
                if (key == "name") w.name = std::string(val);
                else if (key == "seed") w.seed = parse_u64(val);
                else throw ParseError("unknown key '" + std::string(key) + "'" + at);
                break;
            case Sec::params: w.params[std::string(key)] = parse_i64(val); break;
            case Sec::profile: w.profile_params[std::string(key)] = parse_i64(val); break;
            case Sec::live_in:
                if (key != "regs") throw ParseError("expected regs" + at);
                p.live_in = parse_regs(val, ' ');
                break;
            case Sec::array:
                if (key == "length") p.arrays.back().length = std::string(val);
                else if (key == "element_size")
                    p.arrays.back().element_size = static_cast<std::uint32_t>(parse_u64(val));
                else throw ParseError("unknown array key" + at);
                break;
            case Sec::segment:
                if (key == "trip") {
                    p.segments.back().trip = std::string(val);
                } else if (key == "instr") {
                    auto f = words(val);
                    if (f.size() < 2) throw ParseError("bad instr" + at);
                    AbstractInstr in;
                    in.pc = parse_u64(f[0]);
                    in.kind = instr_kind_from_string(f[1]);
                    for (std::size_t k = 2; k < f.size(); ++k) {
                        auto kv = f[k];
                        auto e = kv.find('=');
                        if (e == std::string_view::npos) throw ParseError("bad instr field" + at);
                        auto fk = kv.substr(0, e), fv = kv.substr(e + 1);
                        if (fk == "defs") in.defs = parse_regs(fv, ',');
                        else if (fk == "uses") in.uses = parse_regs(fv, ',');
                        else if (fk == "access") in.access = parse_access(fv);
                        else throw ParseError("unknown instr field" + at);
                    }
                    p.segments.back().body.push_back(std::move(in));
                } else {
                    throw ParseError("unknown segment key" + at);
                }
                break;
            case Sec::edges: {
                auto ids = parse_ids(val);
                if (key != "edge" || ids.size() != 2) throw ParseError("bad edge" + at);
                p.edges.push_back({ids[0], ids[1]});
                break;
            }
            case Sec::loop:
                if (key == "members") p.loops.back().members = parse_ids(val);
                else if (key == "repeat") p.loops.back().repeat = std::string(val);
                else throw ParseError("unknown loop key" + at);
                break;
            case Sec::divergence: {
                auto& d = p.divergences.back();
                auto ids = parse_ids(val);
                if (key == "source" && ids.size() == 1) d.source = ids[0];
                else if (key == "arms") d.arms = ids;
                else if (key == "join" && ids.size() == 1) d.join = ids[0];
                else throw ParseError("bad divergence key" + at);
                break;
            }
        }
    }
    w.program = build_program(std::move(w.program));
    return w;
}

void write_trace(std::ostream& os, const DynamicTrace& t) {
    os << kTraceHeader << '\n';
    std::string line;
    for (const auto& r : t.records) {
        line.clear();
        line += std::to_string(r.seq);
        line += '\t';
        line += std::to_string(r.segment);
        line += '\t';
        line += hex(r.pc);
        line += '\t';
        line += to_string(r.kind);
        line += '\t';
        line += r.address ? hex(*r.address) : "-";
        line += '\n';
        os << line;
    }
}

std::string serialize_trace(const DynamicTrace& t) {
    std::ostringstream os;
    write_trace(os, t);
    return os.str();
}

DynamicTrace parse_trace(std::string_view text) {
    auto lines = split(text, '\n');
    if (lines.empty() || trim(lines[0]) != kTraceHeader) throw ParseError("missing 'ALPTRACE v1' header");
    DynamicTrace t;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (lines[n].empty()) continue;
        auto f = split(lines[n], '\t');
        if (f.size() != 5) throw ParseError("trace line " + std::to_string(n + 1) + ": expected 5 fields");
        TraceRecord r;
        r.seq = parse_u64(f[0]);
        r.segment = static_cast<SegmentId>(parse_u64(f[1]));
        r.pc = parse_u64(f[2]);
        r.kind = instr_kind_from_string(f[3]);
        if (f[4] != "-") r.address = parse_u64(f[4]);
        if (!t.records.empty() && r.seq <= t.records.back().seq)
            throw ParseError("sequence numbers must strictly increase");
        t.records.push_back(r);
    }
    return t;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOFailure("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOFailure("cannot write '" + path + "'");
    out << contents;
    if (!out) throw IOFailure("short write to '" + path + "'");
}

}  // namespace alp
