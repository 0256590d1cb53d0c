#include "cbspmv/cache_sim.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <vector>

#include "cbspmv/error.hpp"

namespace cbspmv {

void validate(const CacheConfig& c) {
    auto pow2 = [](std::uint64_t v) { return v != 0 && std::has_single_bit(v); };
    if (!pow2(c.capacity_bytes) || !pow2(c.line_bytes) || !pow2(c.associativity))
        throw Error("cache capacity, line size and associativity must be powers of two");
    if (c.capacity_bytes % (c.line_bytes * c.associativity) != 0 || c.set_count() == 0)
        throw Error("cache capacity " + std::to_string(c.capacity_bytes) +
                    " is not a multiple of line_bytes * associativity");
}

CacheResult simulate_cache(const AccessTrace& t, const CacheConfig& c) {
    validate(c);
    if (t.empty())
        throw Error("cannot simulate an empty access trace");

    const std::uint64_t sets = c.set_count();
    const std::uint64_t ways = c.associativity;
    // Per set, resident line tags ordered most- to least-recently used.
    std::vector<std::uint64_t> tags(sets * ways);
    std::vector<std::uint32_t> fill(sets, 0);

    CacheResult r;
    auto touch = [&](std::uint64_t line) {
        const std::uint64_t set = line % sets;
        std::uint64_t* way = &tags[set * ways];
        std::uint32_t& used = fill[set];
        ++r.accesses;
        auto* end = way + used;
        auto* it = std::find(way, end, line);
        if (it != end) {
            ++r.hits;
            std::rotate(way, it, it + 1);
            return;
        }
        if (used < ways)
            ++used;
        std::copy_backward(way, way + used - 1, way + used);
        way[0] = line;
    };

    for (const auto& a : t) {
        const std::uint64_t size = std::max<std::uint64_t>(a.size, 1);
        const std::uint64_t first = a.address / c.line_bytes;
        const std::uint64_t last = (a.address + size - 1) / c.line_bytes;
        for (std::uint64_t line = first; line <= last; ++line)
            touch(line);
    }
    r.hit_rate = static_cast<double>(r.hits) / static_cast<double>(r.accesses);
    return r;
}

}  // namespace cbspmv
