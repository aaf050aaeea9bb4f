#pragma once

// Two-sided memory system: host L1/L2/LLC behind an off-chip link, NDP L1
// next to DRAM. Time is in ticks; energy in integer pJ.

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>

#include "alp/cache.hpp"
#include "alp/common.hpp"
#include "alp/config.hpp"

namespace alp {

struct EnergyLedger {
    std::uint64_t l1_host = 0;
    std::uint64_t l2 = 0;
    std::uint64_t llc = 0;
    std::uint64_t l1_ndp = 0;
    std::uint64_t dram_internal = 0;
    std::uint64_t logic_layer = 0;
    std::uint64_t serdes = 0;

    std::uint64_t total() const { return l1_host + l2 + llc + l1_ndp + dram_internal + logic_layer + serdes; }
    friend bool operator==(const EnergyLedger&, const EnergyLedger&) = default;
};

/// Busy intervals of a serial resource. Each reservation takes the earliest
/// gap at or after the requested tick.
class Calendar {
  public:
    Tick reserve(Tick earliest, Tick duration);
    /// Forget intervals that end before `t`; later reservations must not start earlier.
    void retire_before(Tick t);
    Tick busy_ticks() const { return busy_; }

  private:
    std::map<Tick, Tick> busy_intervals_;  // start -> end, disjoint, coalesced
    Tick busy_ = 0;
    Tick floor_ = 0;
};

enum class Owner : std::uint8_t { memory, host, ndp };
std::string_view to_string(Owner o);

struct Ownership {
    Owner owner = Owner::memory;
    bool dirty = false;
};

struct AccessResult {
    Tick done = 0;
    bool l1_miss = false;
    bool llc_miss = false;  // went past the last cache level on its side
    bool crossing = false;
    Tick waited = 0;  // extra ticks spent waiting for an in-flight push
};

struct TransferCost {
    Tick latency = 0;
    std::uint64_t energy_pj = 0;
};

struct MemoryStats {
    std::uint64_t dram_reads = 0;
    std::uint64_t writebacks = 0;
    std::uint64_t crossings = 0;
    std::uint64_t pushes = 0;
    std::uint64_t link_transfers = 0;  // 64 B units that used the link
};

class MemorySystem {
  public:
    /// With free_crossings, a line last written by the other side is
    /// delivered as if it hit in the local L1, at no energy cost.
    explicit MemorySystem(const MachineConfig& cfg, bool free_crossings = false);

    AccessResult access(Side side, LineAddr line, bool write, Tick t);

    /// Move a line written on `src` to `dst`'s cache (host LLC or NDP L1).
    /// Throws NotOwner if `src` neither holds the line nor wrote it last.
    TransferCost transfer_line(LineAddr line, Side src, Side dst, Tick t);

    Ownership ownership(LineAddr line) const;
    std::optional<Side> last_writer(LineAddr line) const;
    Tick available_at(LineAddr line) const;

    const SetAssocCache& host_l1() const { return l1_; }
    const SetAssocCache& host_l2() const { return l2_; }
    const SetAssocCache& host_llc() const { return llc_; }
    const SetAssocCache& ndp_l1() const { return ndp_; }

    const EnergyLedger& energy() const { return energy_; }
    const MemoryStats& stats() const { return stats_; }
    const Calendar& link() const { return link_; }
    void retire_before(Tick t);

    // Per-line energies in pJ.
    std::uint64_t host_dram_pj() const;
    std::uint64_t ndp_dram_pj() const;
    std::uint64_t link_move_pj() const;

  private:
    struct LineInfo {
        std::optional<Side> writer;
        Tick available = 0;
    };

    bool held_by(Side s, LineAddr line) const;
    std::optional<bool> drop(Side s, LineAddr line);  // invalidate every copy on a side
    void fill_host(LineAddr line, bool dirty, Tick t, bool to_upper_levels = true);
    void fill_ndp(LineAddr line, bool dirty, Tick t);
    void writeback(Side from, Tick t);
    Tick crossing(Side side, LineAddr line, bool write, Tick t);

    MachineConfig cfg_;
    bool free_crossings_;
    SetAssocCache l1_, l2_, llc_, ndp_;
    std::unordered_map<LineAddr, LineInfo> lines_;
    Calendar link_;
    Calendar dram_;
    Tick port_free_ = 0;
    EnergyLedger energy_;
    MemoryStats stats_;
};

}  // namespace alp
