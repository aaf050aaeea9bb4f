#pragma once

// Trace-driven timing and energy simulation of a placed program.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "alp/config.hpp"
#include "alp/ir.hpp"
#include "alp/memory.hpp"

namespace alp {

using UnitId = std::uint32_t;

struct EpochStats {
    UnitId unit = 0;
    Side side = Side::host;
    std::uint64_t index = 0;  // per-unit epoch counter
    std::uint64_t instructions = 0;
    Tick ticks = 0;
    std::uint64_t mem_refs = 0;
    std::uint64_t l1_misses = 0;
    std::uint64_t llc_misses = 0;

    double ipc() const;
};

struct TransferRoute {
    SegmentId producer = 0;
    SegmentId consumer = 0;
    bool concurrent = false;
    friend bool operator==(const TransferRoute&, const TransferRoute&) = default;
};

/// Generator store pc -> route of the lines it writes.
using TransferPlan = std::map<Pc, TransferRoute>;

class PlacementPolicy {
  public:
    virtual ~PlacementPolicy() = default;

    /// Side a segment runs on from now on. Queried at every instance start
    /// and after every epoch.
    virtual Side side_of(SegmentId s) const = 0;
    virtual UnitId unit_of(SegmentId s) const { return s; }
    /// For units whose epochs may only close when this segment starts an instance.
    virtual std::optional<SegmentId> iteration_head(UnitId) const { return std::nullopt; }
    virtual void on_epoch(const EpochStats&, Tick) {}
    virtual const TransferPlan& transfers() const;
};

/// Fixed side per segment. Throws PlacementGap for an unplaced segment.
class StaticPlacement : public PlacementPolicy {
  public:
    StaticPlacement() = default;
    explicit StaticPlacement(std::map<SegmentId, Side> sides, TransferPlan plan = {});
    static StaticPlacement uniform(const SegmentProgram& p, Side s);

    Side side_of(SegmentId s) const override;
    const TransferPlan& transfers() const override { return plan_; }

  private:
    std::map<SegmentId, Side> sides_;
    TransferPlan plan_;
};

struct SegmentStats {
    std::uint64_t instances = 0;
    std::uint64_t instructions = 0;
    Tick ticks = 0;
    std::uint64_t mem_refs = 0;
    std::uint64_t l1_misses = 0;
    std::uint64_t llc_misses = 0;

    std::uint64_t cycles() const { return ticks_to_cycles(ticks); }
    double ipc() const;
    friend bool operator==(const SegmentStats&, const SegmentStats&) = default;
};

struct TransferStats {
    std::uint64_t lines_moved = 0;
    Tick hidden_ticks = 0;
    Tick exposed_ticks = 0;
    friend bool operator==(const TransferStats&, const TransferStats&) = default;
};

struct SimResult {
    Tick total_ticks = 0;
    std::uint64_t instructions = 0;
    std::uint64_t handoffs = 0;
    std::map<SegmentId, SegmentStats> segments;
    EnergyLedger energy;
    TransferStats transfers;
    std::uint64_t crossings = 0;
    std::uint64_t dram_reads = 0;
    std::uint64_t link_transfers = 0;

    std::uint64_t total_cycles() const { return ticks_to_cycles(total_ticks); }
    friend bool operator==(const SimResult&, const SimResult&) = default;
};

struct SimOptions {
    bool free_crossings = false;  // ideal movement: remote lines arrive like local L1 hits
};

SimResult simulate(const DynamicTrace& trace, PlacementPolicy& policy, const MachineConfig& cfg,
                   SimOptions opts = {});

/// Flat `key = value` block.
std::string to_key_values(const SimResult& r);
/// One CSV row per segment, with a header line.
std::string segments_csv(const SimResult& r);

struct SegmentTiming {
    std::uint64_t host_cycles = 0;
    std::uint64_t ndp_cycles = 0;
    Side best = Side::host;  // ties go to host
};

/// Runs every segment alone, cold, on each side.
std::map<SegmentId, SegmentTiming> oracle_segment_timing(const SegmentProgram& p, const ParamMap& params,
                                                         std::uint64_t seed, const MachineConfig& cfg);

}  // namespace alp
