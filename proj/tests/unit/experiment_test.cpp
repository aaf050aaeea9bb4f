#include <gtest/gtest.h>

#include <algorithm>

#include "alp/experiment.hpp"
#include "alp/synth.hpp"

using namespace alp;

namespace {

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Mode, Names) {
    for (Mode m : kAllModes) EXPECT_EQ(mode_from_string(to_string(m)), m);
    EXPECT_THROW(mode_from_string("gpu"), ParameterError);
}

TEST(RunMode, CpuSpeedupIsOne) {
    MachineConfig cfg;
    const auto pw = prepare(gen_synth_workload(512, 2, 1), 5, cfg);
    const auto r = run_mode(pw, cfg, Mode::cpu);
    EXPECT_EQ(r.speedup, 1.0);
    EXPECT_EQ(r.seed, 5u);
    EXPECT_EQ(r.cycles, pw.cpu.total_cycles());
}

TEST(RunMode, OrderIndependent) {
    MachineConfig cfg;
    const auto pw = prepare(gen_synth_workload(1024, 2, 1), 1, cfg);
    const auto a1 = run_mode(pw, cfg, Mode::alp);
    const auto d1 = run_mode(pw, cfg, Mode::dm_included);
    const auto d2 = run_mode(pw, cfg, Mode::dm_included);
    const auto a2 = run_mode(pw, cfg, Mode::alp);
    EXPECT_EQ(a1.sim, a2.sim);
    EXPECT_EQ(d1.sim, d2.sim);
    EXPECT_EQ(a1.decisions, a2.decisions);
}

TEST(RunMode, NoDmNeverSlowerThanDmIncluded) {
    MachineConfig cfg;
    const auto pw = prepare(gen_synth_workload(4096, 4, 1), 1, cfg);
    EXPECT_LE(run_mode(pw, cfg, Mode::no_dm).cycles, run_mode(pw, cfg, Mode::dm_included).cycles);
}

TEST(Suite, OneRowPlusSummary) {
    ExperimentSpec spec;
    spec.workloads = {gen_compute_workload(100)};
    spec.modes = {Mode::cpu};
    spec.seeds = {1};
    const auto rep = run_suite(spec);
    const auto csv = rep.csv();
    EXPECT_EQ(csv.rfind(std::string(kReportHeader) + "\n", 0), 0u);
    EXPECT_EQ(lines(csv), 4u);  // version, header, data, summary
    EXPECT_NE(csv.find("GEOMEAN,cpu,all,,1.000000,"), std::string::npos);
    EXPECT_NE(csv.find(",1250\n"), std::string::npos);
}

TEST(Suite, SequentialWorkloadIdenticalAcrossSeeds) {
    ExperimentSpec spec;
    spec.workloads = {gen_compute_workload(300)};
    spec.modes = {Mode::cpu, Mode::ndp};
    spec.seeds = {1, 2, 3};
    const auto rep = run_suite(spec);
    ASSERT_EQ(rep.rows.size(), 6u);
    for (const auto& r : rep.rows) EXPECT_EQ(r.cycles, rep.rows.front().cycles);
}

TEST(Suite, RejectsEmptySelections) {
    ExperimentSpec spec;
    spec.seeds = {1};
    EXPECT_THROW(run_suite(spec), ParameterError);
    spec.modes = {Mode::cpu};
    spec.seeds.clear();
    EXPECT_THROW(run_suite(spec), ParameterError);
}

TEST(Suite, UnwritableOutputFails) {
    ExperimentSpec spec;
    spec.workloads = {gen_compute_workload(10)};
    spec.modes = {Mode::cpu};
    spec.seeds = {1};
    spec.out = "/nonexistent-dir/report.csv";
    EXPECT_THROW(run_suite(spec), IOFailure);
}

TEST(Suite, SummaryNotesTableSize) {
    ExperimentSpec spec;
    spec.workloads = {gen_compute_workload(10)};
    spec.modes = {Mode::cpu};
    spec.seeds = {1};
    const auto text = run_suite(spec).summary();
    EXPECT_NE(text.find("1250 bits = 156.25 bytes"), std::string::npos);
    EXPECT_NE(text.find("1.25 KB"), std::string::npos);
}
