#pragma once

// Offload table, epoch-driven placement decisions and rollback.

#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "alp/analysis.hpp"
#include "alp/config.hpp"
#include "alp/sim.hpp"

namespace alp {

enum class BlockType : std::uint8_t { producer, consumer, inseparable, single };
std::string_view to_string(BlockType b);

// Field widths of one table row, in bits.
inline constexpr std::uint32_t kIdBits = 6;
inline constexpr std::uint32_t kRatioBits = 4;
inline constexpr std::uint32_t kBlockTypeBits = 2;
inline constexpr std::uint32_t kL1LlcBits = 4;
inline constexpr std::uint32_t kIpcBits = 4;
inline constexpr std::uint32_t kDecisionBits = 1;
inline constexpr std::uint32_t kEntryBits =
    kRatioBits + kIdBits + kBlockTypeBits + kL1LlcBits + 2 * kIpcBits + kDecisionBits;

struct OffloadTableEntry {
    std::uint8_t id = 0;           // 6 bits
    std::uint8_t ratio = 0;        // 4 bits
    BlockType block_type = BlockType::single;
    std::uint8_t l1llc_ratio = 0;  // 4 bits
    std::uint8_t ipc_host = 0;     // 4 bits
    std::uint8_t ipc_ndp = 0;      // 4 bits
    Side decision = Side::host;    // 1 bit

    // Bookkeeping outside the stored row.
    std::uint32_t host_epochs = 0;
    std::uint32_t ndp_epochs = 0;

    friend bool operator==(const OffloadTableEntry&, const OffloadTableEntry&) = default;
};

struct TableGeometry {
    std::uint32_t row_count = 50;
};

std::uint64_t table_size(const TableGeometry& g);

/// Row-limited table with LRU replacement.
class OffloadTable {
  public:
    explicit OffloadTable(TableGeometry g = {});

    /// Entry for `unit`, inserted (evicting the LRU row when full) if absent.
    OffloadTableEntry& touch(UnitId unit);
    const OffloadTableEntry* find(UnitId unit) const;
    std::size_t size() const { return rows_.size(); }
    std::uint64_t evictions() const { return evictions_; }
    const TableGeometry& geometry() const { return geom_; }

  private:
    TableGeometry geom_;
    std::list<UnitId> lru_;  // front = most recent
    std::map<UnitId, std::pair<OffloadTableEntry, std::list<UnitId>::iterator>> rows_;
    std::uint64_t evictions_ = 0;
};

std::uint8_t quantize_ratio(double v);
std::uint8_t quantize_ipc(double ipc, std::uint32_t issue_width);

/// LLC misses over L1 misses; both global rates share the reference count.
double miss_quotient(const EpochStats& s);

/// Folds one epoch into the entry. The quotient is taken from host epochs only.
OffloadTableEntry monitor_epoch(const EpochStats& s, OffloadTableEntry e, std::uint32_t issue_width);

/// Throws NoHistory without a host epoch. Sets the decision bit.
Side decide_offload(OffloadTableEntry& e, std::uint8_t offload_level);

enum class Rollback : std::uint8_t { stay, migrate_back };
/// Throws NoHistory unless the unit sits on NDP with an NDP epoch recorded.
Rollback check_rollback(const OffloadTableEntry& e);

enum class TransferLeaf : std::uint8_t {
    producer_ndp,       // small data, producer intensive only
    both_ndp,           // small data, both intensive
    both_host,          // small data, neither intensive
    consumer_ndp,       // small data, consumer intensive only
    large_concurrent,   // large data, intensive producer streams to host
    large_host,         // large data otherwise
};
std::string_view to_string(TransferLeaf l);

struct TransferMapping {
    Side producer = Side::host;
    Side consumer = Side::host;
    bool transfer = false;
    TransferLeaf leaf = TransferLeaf::both_host;
};

/// Throws NotTransferCluster unless `c` is a producer/consumer cluster with generators.
TransferMapping map_transfer_cluster(const ClusterAnnotation& c, std::uint64_t inter_data_bytes,
                                     const MachineConfig& cfg, const EpochStats& producer_profile,
                                     const EpochStats& consumer_profile);

struct InseparableMapping {
    bool aggregated = true;
    std::map<SegmentId, Side> sides;
};

/// `member_stats` holds host epoch stats per member.
InseparableMapping map_inseparable(const ClusterAnnotation& c, std::uint64_t inter_data_bytes,
                                   const MachineConfig& cfg, const std::map<SegmentId, EpochStats>& member_stats);

/// Bytes of arrays stored by a segment in `from` and loaded by a segment in `to`.
std::uint64_t inter_data_bytes(const SegmentProgram& p, const ParamMap& params, const std::set<SegmentId>& from,
                               const std::set<SegmentId>& to);

struct OffloadPackage {
    Pc start_pc = 0;
    std::set<Reg> live_ins;
    friend bool operator==(const OffloadPackage&, const OffloadPackage&) = default;
};

OffloadPackage make_offload_package(const SegmentProgram& p, const LivenessMap& live,
                                    const std::vector<SegmentId>& members);

enum class Action : std::uint8_t { stay, offload, rollback, transfer };
std::string_view to_string(Action a);

struct DecisionRecord {
    std::uint64_t epoch = 0;  // global sequence number of closed epochs
    UnitId unit = 0;
    Side side = Side::host;   // side the epoch ran on
    std::uint8_t quotient_level = 0;
    std::uint8_t ipc_host_level = 0;
    std::uint8_t ipc_ndp_level = 0;
    Action action = Action::stay;
    friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

std::string decision_log_csv(const std::vector<DecisionRecord>& log);

/// First host epoch of every segment in an all-host run of `trace`.
std::map<SegmentId, EpochStats> first_host_epochs(const DynamicTrace& trace, const MachineConfig& cfg);

struct AlpInputs {
    const SegmentProgram* program = nullptr;
    ParamMap params;
    std::vector<ClusterAnnotation> clusters;            // annotated
    std::map<SegmentId, EpochStats> consumer_profiles;  // from first_host_epochs
};

inline constexpr UnitId kClusterUnitBase = 1u << 16;

/// Runtime placement: every unit starts on the host, is offloaded after its
/// first epoch when the quotient says so, and rolls back after one NDP
/// epoch if that epoch's IPC level is below the host level.
class AlpPolicy : public PlacementPolicy {
  public:
    AlpPolicy(AlpInputs in, const MachineConfig& cfg);

    Side side_of(SegmentId s) const override;
    UnitId unit_of(SegmentId s) const override;
    std::optional<SegmentId> iteration_head(UnitId u) const override;
    void on_epoch(const EpochStats& s, Tick t) override;
    const TransferPlan& transfers() const override { return plan_; }

    const std::vector<DecisionRecord>& log() const { return log_; }
    const OffloadTable& table() const { return table_; }
    const std::vector<OffloadPackage>& packages() const { return packages_; }
    const std::map<std::uint32_t, TransferMapping>& transfer_mappings() const { return mappings_; }

  private:
    enum class Phase : std::uint8_t { profiling, trial, settled };

    struct Unit {
        std::vector<SegmentId> members;
        BlockType type = BlockType::single;
        std::optional<SegmentId> head;
        std::uint8_t ratio = 0;
        Phase phase = Phase::profiling;
        std::optional<std::uint8_t> profiled_ipc;  // host IPC level known before any host epoch
    };

    Unit& unit(UnitId u) { return units_.at(u); }
    void set_side(UnitId u, Side s);
    Action first_decision(UnitId u, OffloadTableEntry& e, const EpochStats& s);

    MachineConfig cfg_;
    const SegmentProgram* program_;
    LivenessMap live_;
    std::map<UnitId, Unit> units_;
    std::map<SegmentId, UnitId> unit_of_;
    std::map<SegmentId, Side> sides_;
    std::map<std::uint32_t, ClusterAnnotation> transfer_clusters_;  // by producer unit
    std::map<std::uint32_t, std::uint64_t> inter_bytes_;
    std::map<SegmentId, EpochStats> consumer_profiles_;
    std::map<std::uint32_t, TransferMapping> mappings_;
    TransferPlan plan_;
    OffloadTable table_;
    std::vector<DecisionRecord> log_;
    std::vector<OffloadPackage> packages_;
    std::uint64_t epoch_seq_ = 0;
};

}  // namespace alp
