#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cbspmv/blocking.hpp"

namespace cbspmv {

inline constexpr double kDefaultAggregationThreshold = 0.15;

/// Maps aggregated columns back to original column indices, per block row.
///
/// Segment i of `restore_cols` spans [cols_offset[i], cols_offset[i+1]) and
/// lists, in increasing order, the original columns holding at least one
/// non-zero in block row i.
struct ColumnAggregationMap {
    std::vector<std::uint64_t> cols_offset;
    std::vector<Index> restore_cols;

    std::uint64_t segment_length(std::uint64_t blk_row) const {
        return cols_offset[blk_row + 1] - cols_offset[blk_row];
    }

    friend bool operator==(const ColumnAggregationMap&, const ColumnAggregationMap&) = default;
};

/// True when the super-sparse fraction reaches `th0` (inclusive).
bool should_aggregate(const BlockStats& stats, double th0 = kDefaultAggregationThreshold);

/// Compacts every block row leftward over its non-empty columns and re-blocks
/// on the compacted column space. The result keeps the original n_rows,
/// n_cols and grid size; only the block columns in use shrink.
std::pair<BlockedCoo, ColumnAggregationMap> aggregate_columns(const BlockedCoo& b);

/// Original column of `aggregated_col` (block-row-relative, i.e.
/// blk_col * 16 + local_col) in block row `blk_row`. Throws Error when the
/// column lies outside the segment.
Index restore_column(const ColumnAggregationMap& map, std::uint64_t blk_row,
                     std::uint64_t aggregated_col);

/// Structural checks: offsets monotone from 0, segments strictly increasing.
bool is_valid(const ColumnAggregationMap& map, std::uint64_t blk_m, std::uint64_t n_cols);

}  // namespace cbspmv
