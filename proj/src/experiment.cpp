#include "alp/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <map>
#include <sstream>

#include "alp/analysis.hpp"
#include "alp/ir_io.hpp"
#include "alp/marshal.hpp"

namespace alp {

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::cpu: return "cpu";
        case Mode::ndp: return "ndp";
        case Mode::no_dm: return "no_dm";
        case Mode::dm_included: return "dm_included";
        case Mode::alp: return "alp";
    }
    return "?";
}

Mode mode_from_string(std::string_view s) {
    for (Mode m : kAllModes)
        if (to_string(m) == s) return m;
    throw ParameterError("unknown mode '" + std::string(s) + "'");
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    return std::string(buf, r.ptr);
}

PreparedWorkload prepare(Workload w, std::uint64_t seed, const MachineConfig& cfg) {
    w.seed = seed;
    PreparedWorkload pw;
    pw.trace = unroll_trace(w.program, w.params, seed);
    auto cpu = StaticPlacement::uniform(w.program, Side::host);
    pw.cpu = simulate(pw.trace, cpu, cfg);
    pw.workload = std::move(w);
    return pw;
}

namespace {

std::map<SegmentId, Side> oracle_placement(const Workload& w, const MachineConfig& cfg) {
    std::map<SegmentId, Side> out;
    for (const auto& [id, t] : oracle_segment_timing(w.program, w.params, w.seed, cfg)) out[id] = t.best;
    return out;
}

}  // namespace

ModeResult run_mode(const PreparedWorkload& pw, const MachineConfig& cfg, Mode mode) {
    const Workload& w = pw.workload;
    ModeResult r;
    r.workload = w.name;
    r.mode = mode;
    r.seed = w.seed;
    switch (mode) {
        case Mode::cpu:
            r.sim = pw.cpu;
            r.placement = {};
            for (const auto& s : w.program.segments) r.placement[s.id] = Side::host;
            break;
        case Mode::ndp: {
            auto p = StaticPlacement::uniform(w.program, Side::ndp);
            r.sim = simulate(pw.trace, p, cfg);
            for (const auto& s : w.program.segments) r.placement[s.id] = Side::ndp;
            break;
        }
        case Mode::no_dm:
        case Mode::dm_included: {
            r.placement = oracle_placement(w, cfg);
            StaticPlacement p(r.placement);
            r.sim = simulate(pw.trace, p, cfg, {.free_crossings = mode == Mode::no_dm});
            break;
        }
        case Mode::alp: {
            auto clusters = cluster(w.program, liveness(w.program), cfg.cluster_threshold);
            clusters = profile_clusters(w, std::move(clusters));
            AlpPolicy policy({&w.program, w.params, std::move(clusters), first_host_epochs(pw.trace, cfg)}, cfg);
            r.sim = simulate(pw.trace, policy, cfg);
            r.decisions = policy.log();
            break;
        }
    }
    r.cycles = r.sim.total_cycles();
    if (mode == Mode::cpu) r.speedup = 1.0;
    else r.speedup = r.cycles == 0 ? 1.0 : static_cast<double>(pw.cpu.total_cycles()) / static_cast<double>(r.cycles);
    return r;
}

SuiteReport run_suite(const ExperimentSpec& spec) {
    if (spec.modes.empty()) throw ParameterError("no modes selected");
    if (spec.seeds.empty()) throw ParameterError("no seeds selected");
    spec.config.validate();
    SuiteReport rep;
    rep.table_size_bits = table_size(TableGeometry{static_cast<std::uint32_t>(spec.config.table_rows)});
    for (const auto& w : spec.workloads) {
        for (std::uint64_t seed : spec.seeds) {
            const auto pw = prepare(w, seed, spec.config);
            for (Mode m : spec.modes) rep.rows.push_back(run_mode(pw, spec.config, m));
        }
    }
    if (!spec.out.empty()) write_file(spec.out, rep.csv());
    return rep;
}

std::string SuiteReport::csv() const {
    std::ostringstream os;
    os << kReportHeader << '\n'
       << "workload,mode,seed,cycles,speedup,energy_total_pj,energy_l1_host_pj,energy_l2_pj,energy_llc_pj,"
          "energy_l1_ndp_pj,energy_dram_pj,energy_logic_pj,energy_serdes_pj,lines_moved,hidden_cycles,"
          "exposed_cycles,table_size_bits\n";
    std::map<Mode, std::pair<double, std::size_t>> log_speedup;
    std::map<Mode, double> log_energy;
    for (const auto& r : rows) {
        const auto& e = r.sim.energy;
        os << r.workload << ',' << to_string(r.mode) << ',' << r.seed << ',' << r.cycles << ','
           << format_fixed(r.speedup, 6) << ',' << e.total() << ',' << e.l1_host << ',' << e.l2 << ',' << e.llc
           << ',' << e.l1_ndp << ',' << e.dram_internal << ',' << e.logic_layer << ',' << e.serdes << ','
           << r.sim.transfers.lines_moved << ',' << ticks_to_cycles(r.sim.transfers.hidden_ticks) << ','
           << ticks_to_cycles(r.sim.transfers.exposed_ticks) << ',' << table_size_bits << '\n';
        auto& [sum, n] = log_speedup[r.mode];
        sum += std::log(r.speedup);
        ++n;
        log_energy[r.mode] += std::log(static_cast<double>(std::max<std::uint64_t>(e.total(), 1)));
    }
    for (const auto& [mode, acc] : log_speedup) {
        const double n = static_cast<double>(acc.second);
        os << "GEOMEAN," << to_string(mode) << ",all,," << format_fixed(std::exp(acc.first / n), 6) << ','
           << format_fixed(std::exp(log_energy[mode] / n), 0) << ",,,,,,,,,,," << table_size_bits << '\n';
    }
    return os.str();
}

std::string SuiteReport::summary() const {
    std::ostringstream os;
    os << "workload          mode         seed        cycles   speedup      energy_pj\n";
    for (const auto& r : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-17s %-12s %-6llu %13llu %9s %14llu\n", r.workload.c_str(),
                      std::string(to_string(r.mode)).c_str(), static_cast<unsigned long long>(r.seed),
                      static_cast<unsigned long long>(r.cycles), format_fixed(r.speedup, 3).c_str(),
                      static_cast<unsigned long long>(r.sim.energy.total()));
        os << line;
    }
    const double bits = static_cast<double>(table_size_bits);
    os << "offload table: " << table_size_bits << " bits = " << format_fixed(bits / 8.0, 2) << " bytes\n"
       << "note: reading the bit total as bytes would give " << format_fixed(bits / 1000.0, 2)
       << " KB, which overstates the table by a factor of 8\n";
    return os.str();
}

}  // namespace alp
