#pragma once

// Machine and runtime parameters. Defaults describe the evaluated system;
// every field can be overridden from a `key = value` file.

#include <cstdint>
#include <string>
#include <string_view>

namespace alp {

struct CacheGeometry {
    std::uint64_t size_bytes = 0;
    std::uint64_t ways = 0;
    std::uint64_t latency = 0;  // cycles
    std::uint64_t hit_pj = 0;
    std::uint64_t miss_pj = 0;

    std::uint64_t sets() const { return size_bytes / (ways * 64); }
    friend bool operator==(const CacheGeometry&, const CacheGeometry&) = default;
};

struct MachineConfig {
    std::uint64_t issue_width = 4;
    std::uint64_t mlp_window = 32;
    std::uint64_t freq_mhz = 2400;

    CacheGeometry l1{32 * 1024, 8, 4, 5, 33};
    CacheGeometry l2{256 * 1024, 8, 7, 6, 93};
    CacheGeometry llc{8 * 1024 * 1024, 16, 27, 945, 1904};

    std::uint64_t dram_latency = 46;
    std::uint64_t link_latency = 16;
    std::uint64_t link_bandwidth = 16;      // bytes per cycle
    std::uint64_t ndp_mem_bandwidth = 128;  // bytes per cycle
    std::uint64_t translation_latency = 1;

    std::uint64_t serdes_pj_per_bit = 2;
    std::uint64_t dram_pj_per_bit = 2;
    std::uint64_t logic_pj_per_bit = 8;

    std::uint64_t epoch_length = 10'000;
    std::uint64_t offload_level = 14;  // quotient level at or above which a unit goes to NDP
    std::uint64_t table_rows = 50;
    double cluster_threshold = 0.5;

    /// Throws ConfigError on an inconsistent configuration.
    void validate() const;

    // Derived tick counts (64 ticks per cycle).
    std::uint64_t ticks_per_instr() const;
    std::uint64_t link_line_ticks() const;
    std::uint64_t ndp_line_ticks() const;

    friend bool operator==(const MachineConfig&, const MachineConfig&) = default;
};

std::string serialize_config(const MachineConfig& c);
/// Starts from defaults and applies every `key = value` line. Throws ConfigError.
MachineConfig parse_config(std::string_view text);

}  // namespace alp
