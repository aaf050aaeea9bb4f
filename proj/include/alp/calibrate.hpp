#pragma once

// Offline choice of the clustering threshold for a machine.

#include <vector>

#include "alp/config.hpp"
#include "alp/ir.hpp"

namespace alp {

struct PairVerdict {
    SegmentId a = 0;
    SegmentId b = 0;
    double connectivity = 0.0;
    std::uint64_t split_cycles = 0;   // best of a/b on opposite sides, no pushes
    std::uint64_t merged_cycles = 0;  // best of both on one side
    bool split_loses() const { return split_cycles > merged_cycles; }
};

/// Connected adjacent pairs of every corpus workload, each simulated split and merged.
/// Segments outside the pair run on the host.
std::vector<PairVerdict> evaluate_pairs(const MachineConfig& cfg, const std::vector<Workload>& corpus);

/// Largest candidate k/20 (at least the configured floor, at most the highest
/// observed connectivity) such that no pair at or below it loses when split.
/// Returns the floor when no pair is connected. Throws EmptyCorpus.
double calibrate_threshold(const MachineConfig& cfg, const std::vector<Workload>& corpus);

}  // namespace alp
