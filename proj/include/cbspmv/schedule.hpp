#pragma once

#include <cstdint>
#include <vector>

namespace cbspmv {

inline constexpr std::uint32_t kWarpsPerThreadBlock = 8;

/// Assignment of sub-blocks to (thread block, warp) slots.
///
/// slot_of_block[i] = tb_id * warps_per_tb + warp for the i-th block in
/// stored order. Blocks of a balanced matrix are stored in slot order, so
/// each thread block owns a contiguous run of blocks.
struct ThreadBlockSchedule {
    std::uint32_t warps_per_tb = kWarpsPerThreadBlock;
    std::uint64_t tb_count = 0;
    std::vector<std::uint64_t> slot_of_block;
    std::vector<std::uint64_t> load_per_tb;

    std::uint64_t tb_of(std::size_t block) const { return slot_of_block[block] / warps_per_tb; }

    friend bool operator==(const ThreadBlockSchedule&, const ThreadBlockSchedule&) = default;
};

}  // namespace cbspmv
