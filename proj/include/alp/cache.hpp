#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "alp/common.hpp"
#include "alp/config.hpp"

namespace alp {

struct Eviction {
    LineAddr line = 0;
    bool dirty = false;
};

/// Set-associative, true-LRU, write-back cache indexed by line address.
class SetAssocCache {
  public:
    explicit SetAssocCache(const CacheGeometry& g);

    /// Lookup that refreshes recency on a hit.
    bool access(LineAddr line, bool write = false);
    bool contains(LineAddr line) const;
    bool is_dirty(LineAddr line) const;
    void mark_dirty(LineAddr line);

    /// Insert as most-recently-used. The line must not already be present.
    std::optional<Eviction> insert(LineAddr line, bool dirty);
    /// Returns whether the removed copy was dirty, or nothing if absent.
    std::optional<bool> invalidate(LineAddr line);

    std::uint64_t sets() const { return sets_; }
    std::uint64_t ways() const { return ways_; }
    std::vector<LineAddr> resident() const;

  private:
    struct Way {
        LineAddr line = 0;
        std::uint64_t stamp = 0;
        bool valid = false;
        bool dirty = false;
    };

    Way* find(LineAddr line);
    const Way* find(LineAddr line) const;
    Way* set_begin(LineAddr line) { return &ways_store_[(line % sets_) * ways_]; }
    const Way* set_begin(LineAddr line) const { return &ways_store_[(line % sets_) * ways_]; }

    std::uint64_t sets_;
    std::uint64_t ways_;
    std::uint64_t clock_ = 0;
    std::vector<Way> ways_store_;
};

}  // namespace alp
