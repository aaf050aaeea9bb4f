#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "alp/analysis.hpp"
#include "alp/calibrate.hpp"
#include "alp/experiment.hpp"
#include "alp/ir_io.hpp"
#include "alp/marshal.hpp"

using namespace alp;

namespace {

struct Options {
    std::vector<std::string> workloads;
    std::string config;
    std::vector<std::string> modes{"cpu", "ndp", "no_dm", "dm_included", "alp"};
    std::vector<std::uint64_t> seeds{1};
    std::string out;
    std::string decisions;
};

MachineConfig load_config(const Options& o) {
    return o.config.empty() ? MachineConfig{} : parse_config(read_file(o.config));
}

std::vector<Workload> load_workloads(const Options& o) {
    std::vector<Workload> ws;
    for (const auto& path : o.workloads) ws.push_back(parse_workload(read_file(path)));
    return ws;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) std::cout << text;
    else write_file(o.out, text);
}

ExperimentSpec make_spec(const Options& o) {
    ExperimentSpec spec;
    spec.workloads = load_workloads(o);
    spec.config = load_config(o);
    for (const auto& m : o.modes) spec.modes.push_back(mode_from_string(m));
    spec.seeds = o.seeds;
    spec.out = o.out;
    return spec;
}

void write_decisions(const Options& o, const SuiteReport& rep) {
    if (o.decisions.empty()) return;
    std::string text;
    for (const auto& r : rep.rows) {
        if (r.mode != Mode::alp) continue;
        text += "# " + r.workload + " seed " + std::to_string(r.seed) + '\n' + decision_log_csv(r.decisions);
    }
    write_file(o.decisions, text);
}

int run_calibrate(const Options& o) {
    auto cfg = load_config(o);
    const auto corpus = load_workloads(o);
    const double t = calibrate_threshold(cfg, corpus);
    for (const auto& v : evaluate_pairs(cfg, corpus))
        std::cerr << "pair " << v.a << "->" << v.b << " connectivity " << format_fixed(v.connectivity, 4)
                  << " split " << v.split_cycles << " merged " << v.merged_cycles << '\n';
    cfg.cluster_threshold = t;
    std::cout << "cluster_threshold = " << format_fixed(t, 2) << '\n';
    if (!o.out.empty()) write_file(o.out, serialize_config(cfg));
    return 0;
}

int run_analyze(const Options& o) {
    const auto cfg = load_config(o);
    std::string text;
    for (const auto& w : load_workloads(o))
        text += serialize_clusters(cluster(w.program, liveness(w.program), cfg.cluster_threshold));
    emit(o, text);
    return 0;
}

int run_profile(const Options& o) {
    const auto cfg = load_config(o);
    std::string text;
    for (const auto& w : load_workloads(o)) {
        auto cs = cluster(w.program, liveness(w.program), cfg.cluster_threshold);
        text += serialize_clusters(profile_clusters(w, std::move(cs)));
    }
    emit(o, text);
    return 0;
}

int run_simulate(const Options& o) {
    const auto rep = run_suite(make_spec(o));
    for (const auto& r : rep.rows) {
        std::cout << "[" << r.workload << " " << to_string(r.mode) << " seed " << r.seed << "]\n"
                  << "speedup = " << format_fixed(r.speedup, 6) << '\n'
                  << to_key_values(r.sim) << segments_csv(r.sim) << '\n';
    }
    write_decisions(o, rep);
    return 0;
}

int run_report(const Options& o) {
    const auto rep = run_suite(make_spec(o));
    std::cout << rep.summary();
    write_decisions(o, rep);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-data-processing placement toolkit"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool runs) {
        sub->add_option("--workload", o.workloads, "Workload file (ALPIR v1); repeatable")->required();
        sub->add_option("--config", o.config, "Machine config file (key = value)");
        sub->add_option("--out", o.out, "Output path");
        if (runs) {
            sub->add_option("--modes", o.modes, "Comma-separated modes")->delimiter(',');
            sub->add_option("--seeds", o.seeds, "Comma-separated seeds")->delimiter(',');
            sub->add_option("--decisions", o.decisions, "Write the runtime decision log here");
        }
    };

    auto* calibrate = app.add_subcommand("calibrate", "Choose the clustering threshold for a machine");
    add_common(calibrate, false);
    auto* analyze = app.add_subcommand("analyze", "Cluster segments and print the sidecar");
    add_common(analyze, false);
    auto* profile = app.add_subcommand("profile", "Cluster, detect generators and annotate transfers");
    add_common(profile, false);
    auto* simulate = app.add_subcommand("simulate", "Run modes and print detailed results");
    add_common(simulate, true);
    auto* report = app.add_subcommand("report", "Run modes and print a comparison table");
    add_common(report, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*calibrate) return run_calibrate(o);
        if (*analyze) return run_analyze(o);
        if (*profile) return run_profile(o);
        if (*simulate) return run_simulate(o);
        if (*report) return run_report(o);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    return 1;
}
