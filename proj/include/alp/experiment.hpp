#pragma once

// Execution modes, suites and report formatting.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alp/config.hpp"
#include "alp/ir.hpp"
#include "alp/runtime.hpp"
#include "alp/sim.hpp"

namespace alp {

enum class Mode : std::uint8_t { cpu, ndp, no_dm, dm_included, alp };
std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);  // throws ParameterError
inline constexpr Mode kAllModes[] = {Mode::cpu, Mode::ndp, Mode::no_dm, Mode::dm_included, Mode::alp};

/// A workload bound to one seed, with its trace and all-host baseline.
struct PreparedWorkload {
    Workload workload;
    DynamicTrace trace;
    SimResult cpu;
};

PreparedWorkload prepare(Workload w, std::uint64_t seed, const MachineConfig& cfg);

struct ModeResult {
    std::string workload;
    Mode mode = Mode::cpu;
    std::uint64_t seed = 0;
    std::uint64_t cycles = 0;
    double speedup = 1.0;  // cpu cycles / cycles
    SimResult sim;
    std::vector<DecisionRecord> decisions;  // alp only
    std::map<SegmentId, Side> placement;    // static modes only
};

ModeResult run_mode(const PreparedWorkload& pw, const MachineConfig& cfg, Mode mode);

struct ExperimentSpec {
    std::vector<Workload> workloads;
    MachineConfig config;
    std::vector<Mode> modes;
    std::vector<std::uint64_t> seeds;
    std::string out;  // CSV path; empty keeps the report in memory
};

struct SuiteReport {
    std::vector<ModeResult> rows;
    std::uint64_t table_size_bits = 0;

    std::string csv() const;
    std::string summary() const;
};

inline constexpr std::string_view kReportHeader = "#ALPREPORT v1";

/// Runs every (workload, seed, mode). Throws ParameterError for an empty
/// mode or seed list and IOFailure if `out` cannot be written.
SuiteReport run_suite(const ExperimentSpec& spec);

/// Fixed-point rendering used in reports.
std::string format_fixed(double v, int digits);

}  // namespace alp
