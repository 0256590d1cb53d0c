#pragma once

#include <cstdint>

#include "cbspmv/trace.hpp"

namespace cbspmv {

/// Set-associative cache with LRU replacement. All fields are powers of two
/// and capacity is a multiple of line_bytes * associativity.
struct CacheConfig {
    std::uint64_t capacity_bytes = 128 * 1024;
    std::uint64_t line_bytes = 128;
    std::uint64_t associativity = 4;

    std::uint64_t set_count() const { return capacity_bytes / (line_bytes * associativity); }
};

/// One SM's L1: 128 KB, 128 B lines, 4-way.
inline constexpr CacheConfig kDefaultL1{128 * 1024, 128, 4};
/// Desk-scale stand-in for a shared L2: 4 MB, 128 B lines, 16-way.
inline constexpr CacheConfig kDefaultL2{4 * 1024 * 1024, 128, 16};

/// Throws Error when the geometry is not valid.
void validate(const CacheConfig& c);

struct CacheResult {
    std::uint64_t accesses = 0;
    std::uint64_t hits = 0;
    double hit_rate = 0.0;
};

/// Replays `t` through a cold cache. An access straddling a line boundary
/// counts once per line touched. Throws Error on an empty trace.
CacheResult simulate_cache(const AccessTrace& t, const CacheConfig& c);

}  // namespace cbspmv
