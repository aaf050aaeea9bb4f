#include "alp/memory.hpp"

#include <algorithm>
#include <iterator>

namespace alp {

Tick Calendar::reserve(Tick earliest, Tick duration) {
    Tick t = earliest;
    auto it = busy_intervals_.upper_bound(t);
    if (it != busy_intervals_.begin()) {
        auto p = std::prev(it);
        if (p->second > t) t = p->second;
    }
    while (it != busy_intervals_.end() && it->first < t + duration) {
        t = std::max(t, it->second);
        ++it;
    }
    busy_ += duration;
    Tick s = t, e = t + duration;
    if (it != busy_intervals_.end() && it->first == e) {
        e = it->second;
        it = busy_intervals_.erase(it);
    }
    if (it != busy_intervals_.begin()) {
        auto p = std::prev(it);
        if (p->second == s) {
            p->second = e;
            return t;
        }
    }
    busy_intervals_.emplace_hint(it, s, e);
    return t;
}

void Calendar::retire_before(Tick t) {
    floor_ = std::max(floor_, t);
    while (!busy_intervals_.empty() && busy_intervals_.begin()->second < floor_)
        busy_intervals_.erase(busy_intervals_.begin());
}

std::string_view to_string(Owner o) {
    switch (o) {
        case Owner::memory: return "memory";
        case Owner::host: return "host";
        case Owner::ndp: return "ndp";
    }
    return "?";
}

MemorySystem::MemorySystem(const MachineConfig& cfg, bool free_crossings)
    : cfg_(cfg), free_crossings_(free_crossings), l1_(cfg.l1), l2_(cfg.l2), llc_(cfg.llc), ndp_(cfg.l1) {
    cfg_.validate();
}

std::uint64_t MemorySystem::host_dram_pj() const {
    return kLineBits * (cfg_.dram_pj_per_bit + cfg_.logic_pj_per_bit + cfg_.serdes_pj_per_bit);
}
std::uint64_t MemorySystem::ndp_dram_pj() const { return kLineBits * (cfg_.dram_pj_per_bit + cfg_.logic_pj_per_bit); }
std::uint64_t MemorySystem::link_move_pj() const { return kLineBits * (cfg_.serdes_pj_per_bit + cfg_.logic_pj_per_bit); }

bool MemorySystem::held_by(Side s, LineAddr line) const {
    return s == Side::host ? llc_.contains(line) : ndp_.contains(line);
}

std::optional<bool> MemorySystem::drop(Side s, LineAddr line) {
    if (s == Side::ndp) return ndp_.invalidate(line);
    auto a = l1_.invalidate(line), b = l2_.invalidate(line), c = llc_.invalidate(line);
    if (!a && !b && !c) return std::nullopt;
    return a.value_or(false) || b.value_or(false) || c.value_or(false);
}

void MemorySystem::writeback(Side from, Tick t) {
    ++stats_.writebacks;
    energy_.dram_internal += kLineBits * cfg_.dram_pj_per_bit;
    energy_.logic_layer += kLineBits * cfg_.logic_pj_per_bit;
    if (from == Side::host) {
        energy_.serdes += kLineBits * cfg_.serdes_pj_per_bit;
        link_.reserve(t, cfg_.link_line_ticks());
        ++stats_.link_transfers;
    } else {
        dram_.reserve(t, cfg_.ndp_line_ticks());
    }
}

void MemorySystem::fill_host(LineAddr line, bool dirty, Tick t, bool to_upper_levels) {
    if (!llc_.contains(line)) {
        if (auto ev = llc_.insert(line, false)) {
            // Inclusive of the host L1/L2 only; an NDP copy survives and becomes exclusive.
            const bool d1 = l1_.invalidate(ev->line).value_or(false);
            const bool d2 = l2_.invalidate(ev->line).value_or(false);
            if (ev->dirty || d1 || d2) writeback(Side::host, t);
        }
    }
    if (!to_upper_levels) {
        if (dirty) llc_.mark_dirty(line);
        return;
    }
    if (!l2_.contains(line)) {
        if (auto ev = l2_.insert(line, false); ev && ev->dirty) llc_.mark_dirty(ev->line);
    }
    if (!l1_.contains(line)) {
        if (auto ev = l1_.insert(line, dirty); ev && ev->dirty) {
            if (l2_.contains(ev->line)) l2_.mark_dirty(ev->line);
            else llc_.mark_dirty(ev->line);
        }
    } else if (dirty) {
        l1_.mark_dirty(line);
    }
}

void MemorySystem::fill_ndp(LineAddr line, bool dirty, Tick t) {
    if (ndp_.contains(line)) {
        if (dirty) ndp_.mark_dirty(line);
        return;
    }
    if (auto ev = ndp_.insert(line, dirty); ev && ev->dirty) writeback(Side::ndp, t);
}

Tick MemorySystem::crossing(Side side, LineAddr line, bool write, Tick ready) {
    const Side o = other(side);
    auto& info = lines_[line];
    // One coherence request in flight at a time between the two sides.
    const Tick start = std::max(ready, port_free_);
    Tick probe;
    if (held_by(o, line)) {
        probe = o == Side::host ? cfg_.llc.latency : cfg_.l1.latency;
        if (o == Side::host) energy_.llc += cfg_.llc.hit_pj;
        else energy_.l1_ndp += cfg_.l1.hit_pj;
    } else {
        probe = cfg_.dram_latency;
        energy_.dram_internal += kLineBits * cfg_.dram_pj_per_bit;
        ++stats_.dram_reads;
    }
    const Tick sent = link_.reserve(start + (cfg_.link_latency + probe) * kTicksPerCycle, cfg_.link_line_ticks());
    const Tick done = sent + cfg_.link_line_ticks() + cfg_.link_latency * kTicksPerCycle;
    port_free_ = done;
    energy_.serdes += kLineBits * cfg_.serdes_pj_per_bit;
    energy_.logic_layer += kLineBits * cfg_.logic_pj_per_bit;
    ++stats_.crossings;
    ++stats_.link_transfers;

    const bool dirty = drop(o, line).value_or(false);
    if (side == Side::host) fill_host(line, write || dirty, ready);
    else fill_ndp(line, write || dirty, ready);
    info.writer = write ? std::optional<Side>(side) : std::nullopt;
    return done;
}

AccessResult MemorySystem::access(Side side, LineAddr line, bool write, Tick t) {
    AccessResult r;
    auto& info = lines_[line];
    const Side o = other(side);
    const Tick xlat = side == Side::ndp ? cfg_.translation_latency : 0;

    if (free_crossings_ && info.writer == o && !held_by(side, line)) {
        if (side == Side::host) energy_.l1_host += cfg_.l1.hit_pj;
        else energy_.l1_ndp += cfg_.l1.hit_pj;
        const bool dirty = drop(o, line).value_or(false);
        if (side == Side::host) fill_host(line, write || dirty, t);
        else fill_ndp(line, write || dirty, t);
        info.writer = write ? std::optional<Side>(side) : std::nullopt;
        ++stats_.crossings;
        r.crossing = true;
        r.done = t + (cfg_.l1.latency + xlat) * kTicksPerCycle;
    } else if (side == Side::host) {
        Tick lat = cfg_.l1.latency;
        if (l1_.access(line, write)) {
            energy_.l1_host += cfg_.l1.hit_pj;
            r.done = t + lat * kTicksPerCycle;
        } else {
            energy_.l1_host += cfg_.l1.miss_pj;
            r.l1_miss = true;
            lat += cfg_.l2.latency;
            if (l2_.access(line)) {
                energy_.l2 += cfg_.l2.hit_pj;
                fill_host(line, write, t);
                r.done = t + lat * kTicksPerCycle;
            } else {
                energy_.l2 += cfg_.l2.miss_pj;
                lat += cfg_.llc.latency;
                if (llc_.access(line)) {
                    energy_.llc += cfg_.llc.hit_pj;
                    fill_host(line, write, t);
                    r.done = t + lat * kTicksPerCycle;
                } else {
                    energy_.llc += cfg_.llc.miss_pj;
                    r.llc_miss = true;
                    if (info.writer == Side::ndp) {
                        r.crossing = true;
                        r.done = crossing(Side::host, line, write, t + lat * kTicksPerCycle);
                    } else {
                        const Tick ready = t + (lat + cfg_.dram_latency) * kTicksPerCycle;
                        const Tick sent = link_.reserve(ready, cfg_.link_line_ticks());
                        r.done = sent + cfg_.link_line_ticks() + cfg_.link_latency * kTicksPerCycle;
                        energy_.dram_internal += kLineBits * cfg_.dram_pj_per_bit;
                        energy_.logic_layer += kLineBits * cfg_.logic_pj_per_bit;
                        energy_.serdes += kLineBits * cfg_.serdes_pj_per_bit;
                        ++stats_.dram_reads;
                        ++stats_.link_transfers;
                        fill_host(line, write, t);
                    }
                }
            }
        }
    } else {
        const Tick lat = cfg_.l1.latency + xlat;
        if (ndp_.access(line, write)) {
            energy_.l1_ndp += cfg_.l1.hit_pj;
            r.done = t + lat * kTicksPerCycle;
        } else {
            energy_.l1_ndp += cfg_.l1.miss_pj;
            r.l1_miss = r.llc_miss = true;
            if (info.writer == Side::host) {
                r.crossing = true;
                r.done = crossing(Side::ndp, line, write, t + lat * kTicksPerCycle);
            } else {
                const Tick slot = dram_.reserve(t + lat * kTicksPerCycle, cfg_.ndp_line_ticks());
                r.done = slot + cfg_.ndp_line_ticks() + cfg_.dram_latency * kTicksPerCycle;
                energy_.dram_internal += kLineBits * cfg_.dram_pj_per_bit;
                energy_.logic_layer += kLineBits * cfg_.logic_pj_per_bit;
                ++stats_.dram_reads;
                fill_ndp(line, write, t);
            }
        }
    }

    if (write && info.writer != side) {
        drop(o, line);
        info.writer = side;
    }
    if (info.available > r.done) {
        r.waited = info.available - r.done;
        r.done = info.available;
    }
    return r;
}

TransferCost MemorySystem::transfer_line(LineAddr line, Side src, Side dst, Tick t) {
    auto& info = lines_[line];
    if (src == dst || (held_by(dst, line) && !held_by(src, line))) return {};
    if (!held_by(src, line) && info.writer != src)
        throw NotOwner("line " + std::to_string(line) + " is not held by " + std::string(to_string(src)));

    Tick ready = t;
    std::uint64_t pj = link_move_pj();
    if (!held_by(src, line)) {
        // Written back already; read it out of DRAM first.
        ready += cfg_.dram_latency * kTicksPerCycle;
        energy_.dram_internal += kLineBits * cfg_.dram_pj_per_bit;
        pj += kLineBits * cfg_.dram_pj_per_bit;
        ++stats_.dram_reads;
    }
    const Tick sent = link_.reserve(ready, cfg_.link_line_ticks());
    const Tick arrival = sent + cfg_.link_line_ticks() + cfg_.link_latency * kTicksPerCycle;
    energy_.serdes += kLineBits * cfg_.serdes_pj_per_bit;
    energy_.logic_layer += kLineBits * cfg_.logic_pj_per_bit;
    ++stats_.pushes;
    ++stats_.link_transfers;

    drop(src, line);
    if (dst == Side::host) fill_host(line, true, t, false);
    else fill_ndp(line, true, t);
    info.writer = dst;
    info.available = arrival;
    return {arrival - t, pj};
}

Ownership MemorySystem::ownership(LineAddr line) const {
    const auto w = last_writer(line);
    const bool host = llc_.contains(line), ndp = ndp_.contains(line);
    Owner o = Owner::memory;
    if (w && held_by(*w, line)) o = *w == Side::host ? Owner::host : Owner::ndp;
    else if (host) o = Owner::host;
    else if (ndp) o = Owner::ndp;
    bool dirty = false;
    if (o == Owner::host) dirty = l1_.is_dirty(line) || l2_.is_dirty(line) || llc_.is_dirty(line);
    if (o == Owner::ndp) dirty = ndp_.is_dirty(line);
    return {o, dirty};
}

std::optional<Side> MemorySystem::last_writer(LineAddr line) const {
    auto it = lines_.find(line);
    return it == lines_.end() ? std::nullopt : it->second.writer;
}

Tick MemorySystem::available_at(LineAddr line) const {
    auto it = lines_.find(line);
    return it == lines_.end() ? 0 : it->second.available;
}

void MemorySystem::retire_before(Tick t) {
    link_.retire_before(t);
    dram_.retire_before(t);
}

}  // namespace alp
