#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cbspmv/packing.hpp"
#include "cbspmv/schedule.hpp"

namespace cbspmv {

struct LoadStats {
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::uint64_t max = 0;
    std::uint64_t min = 0;
};

LoadStats load_stats(std::span<const std::uint64_t> loads);
inline LoadStats load_stats(const ThreadBlockSchedule& s) { return load_stats(s.load_per_tb); }

/// Per-thread-block nnz when blocks are grouped `warps_per_tb` at a time in
/// stored order (the unbalanced launch).
std::vector<std::uint64_t> contiguous_loads(std::span<const std::uint32_t> nnz_per_blk,
                                            std::uint32_t warps_per_tb = kWarpsPerThreadBlock);

/// Greedy largest-first assignment of blocks to thread-block warp slots.
///
/// Blocks are visited by nnz descending (stable on index). Each goes to the
/// least-loaded thread block that still has a free warp; ties go to the
/// lowest tb_id. Returns the slot (tb_id * warps_per_tb + warp) of every
/// block, indexed by its position in `nnz_per_blk`.
std::vector<std::uint64_t> assign_slots(std::span<const std::uint32_t> nnz_per_blk,
                                        std::uint32_t warps_per_tb = kWarpsPerThreadBlock);

/// Reorders the five per-block arrays into slot order and attaches the
/// schedule. Payload bytes stay where they are; only vp offsets move.
PackedMatrix balance(PackedMatrix p, std::uint32_t warps_per_tb = kWarpsPerThreadBlock);

}  // namespace cbspmv
