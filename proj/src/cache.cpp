#include "alp/cache.hpp"

namespace alp {

SetAssocCache::SetAssocCache(const CacheGeometry& g)
    : sets_(g.sets()), ways_(g.ways), ways_store_(g.sets() * g.ways) {
    if (sets_ == 0 || ways_ == 0) throw ConfigError("cache with no sets");
}

SetAssocCache::Way* SetAssocCache::find(LineAddr line) {
    Way* w = set_begin(line);
    for (std::uint64_t i = 0; i < ways_; ++i)
        if (w[i].valid && w[i].line == line) return &w[i];
    return nullptr;
}

const SetAssocCache::Way* SetAssocCache::find(LineAddr line) const {
    const Way* w = set_begin(line);
    for (std::uint64_t i = 0; i < ways_; ++i)
        if (w[i].valid && w[i].line == line) return &w[i];
    return nullptr;
}

bool SetAssocCache::access(LineAddr line, bool write) {
    Way* w = find(line);
    if (!w) return false;
    w->stamp = ++clock_;
    w->dirty = w->dirty || write;
    return true;
}

bool SetAssocCache::contains(LineAddr line) const { return find(line) != nullptr; }

bool SetAssocCache::is_dirty(LineAddr line) const {
    const Way* w = find(line);
    return w && w->dirty;
}

void SetAssocCache::mark_dirty(LineAddr line) {
    if (Way* w = find(line)) w->dirty = true;
}

std::optional<Eviction> SetAssocCache::insert(LineAddr line, bool dirty) {
    Way* set = set_begin(line);
    Way* victim = &set[0];
    for (std::uint64_t i = 0; i < ways_; ++i) {
        if (!set[i].valid) {
            victim = &set[i];
            break;
        }
        if (set[i].stamp < victim->stamp) victim = &set[i];
    }
    std::optional<Eviction> out;
    if (victim->valid) out = Eviction{victim->line, victim->dirty};
    *victim = Way{line, ++clock_, true, dirty};
    return out;
}

std::optional<bool> SetAssocCache::invalidate(LineAddr line) {
    Way* w = find(line);
    if (!w) return std::nullopt;
    const bool dirty = w->dirty;
    *w = Way{};
    return dirty;
}

std::vector<LineAddr> SetAssocCache::resident() const {
    std::vector<LineAddr> out;
    for (const auto& w : ways_store_)
        if (w.valid) out.push_back(w.line);
    return out;
}

}  // namespace alp
