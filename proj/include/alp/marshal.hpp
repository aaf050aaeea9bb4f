#pragma once

// Generator-instruction detection and transfer annotation.

#include <map>
#include <set>
#include <vector>

#include "alp/analysis.hpp"
#include "alp/ir.hpp"

namespace alp {

using GeneratorMap = std::map<std::uint32_t, std::set<Pc>>;  // cluster id -> store pcs

/// Two-list last-writer walk over `trace`. A load that is the first read of
/// its line in the current instance and hits the previous instance's writer
/// list marks that writer, provided the two instances form a forward pair
/// (producer then consumer) inside one cluster.
GeneratorMap detect_generators(const SegmentProgram& p, const DynamicTrace& trace,
                               const std::vector<ClusterAnnotation>& clusters);

/// True iff the producer stores arrays the consumer loads and every access
/// to those arrays in both segments uses one pattern.
bool detect_concurrent_mode(const SegmentProgram& p, const ClusterAnnotation& c);

std::vector<ClusterAnnotation> annotate_transfer(std::vector<ClusterAnnotation> clusters,
                                                 const GeneratorMap& generators,
                                                 const std::map<std::uint32_t, bool>& concurrent);

/// Unroll the workload with its profiling parameters (seed + 1) and annotate.
std::vector<ClusterAnnotation> profile_clusters(const Workload& w, std::vector<ClusterAnnotation> clusters);

/// Seed used for the profiling run of a workload evaluated with `seed`.
inline std::uint64_t profiling_seed(std::uint64_t seed) { return seed + 1; }

}  // namespace alp
