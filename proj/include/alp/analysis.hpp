#pragma once

// Register liveness, segment connectivity and cluster formation.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "alp/ir.hpp"

namespace alp {

struct LivenessSummary {
    std::set<Reg> reg_in;
    std::set<Reg> reg_out;
    friend bool operator==(const LivenessSummary&, const LivenessSummary&) = default;
};

using LivenessMap = std::map<SegmentId, LivenessSummary>;

LivenessMap liveness(const SegmentProgram& p);

/// Fraction of a pair's live registers that pass from a to b.
double connectivity(const LivenessSummary& a, const LivenessSummary& b);

enum class ClusterKind : std::uint8_t { producer_consumer, inseparable };
enum class Role : std::uint8_t { producer, consumer, inseparable };

std::string_view to_string(ClusterKind k);
std::string_view to_string(Role r);

inline constexpr double kDefaultThreshold = 0.5;
inline constexpr double kThresholdFloor = 0.05;
inline constexpr std::uint32_t kMaxClusterId = 63;

struct ClusterAnnotation {
    std::uint32_t id = 0;
    std::vector<SegmentId> members;  // topological order
    ClusterKind kind = ClusterKind::inseparable;
    std::uint8_t ratio_level = 0;  // 0..15
    std::vector<Role> roles;       // parallel to members
    bool concurrent = false;
    std::set<Pc> generator_pcs;

    SegmentId producer() const;
    SegmentId consumer() const;
    bool contains(SegmentId s) const;
    friend bool operator==(const ClusterAnnotation&, const ClusterAnnotation&) = default;
};

/// Topological rank of each segment: reverse postorder of a DFS from the
/// entry, ties between siblings broken by smaller id. Back edges are ignored.
std::map<SegmentId, std::size_t> topo_rank(const SegmentProgram& p);

/// Liveness of a group of segments seen as one unit.
LivenessSummary aggregate_liveness(const SegmentProgram& p, const LivenessMap& live,
                                   const std::set<SegmentId>& members);

/// Partition the program into clusters. Only groups of two or more segments
/// are returned; ids are assigned in order of each cluster's first member.
std::vector<ClusterAnnotation> cluster(const SegmentProgram& p, const LivenessMap& live,
                                       double threshold = kDefaultThreshold);

/// 4-bit level of a fraction, rounding up.
std::uint8_t ratio_level_ceil(double r);

inline constexpr std::string_view kClusterHeader = "ALPCLSTR v1";

std::string serialize_clusters(const std::vector<ClusterAnnotation>& cs);
std::vector<ClusterAnnotation> parse_clusters(std::string_view text);

}  // namespace alp
