#include "cbspmv/column_aggregation.hpp"

#include <algorithm>
#include <string>

#include "cbspmv/error.hpp"

namespace cbspmv {

bool should_aggregate(const BlockStats& stats, double th0) {
    return stats.super_sparse_fraction >= th0;
}

std::pair<BlockedCoo, ColumnAggregationMap> aggregate_columns(const BlockedCoo& b) {
    BlockedCoo out;
    out.n_rows = b.n_rows;
    out.n_cols = b.n_cols;
    out.blk_m = b.blk_m;
    out.blk_n = b.blk_n;

    ColumnAggregationMap map;
    map.cols_offset.assign(b.blk_m + 1, 0);

    struct Entry {
        Index col;
        std::uint8_t local_row;
        double val;
    };
    std::vector<Entry> row_entries;
    std::vector<Index> cols;

    std::size_t i = 0;
    for (std::uint64_t br = 0; br < b.blk_m; ++br) {
        row_entries.clear();
        for (; i < b.blocks.size() && b.blocks[i].blk_row == br; ++i) {
            const auto& blk = b.blocks[i];
            for (const auto& e : blk.elems)
                row_entries.push_back({blk.blk_col * kBlockSize + e.local_col, e.local_row, e.val});
        }

        cols.clear();
        for (const auto& e : row_entries)
            cols.push_back(e.col);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

        map.cols_offset[br + 1] = map.cols_offset[br] + cols.size();
        map.restore_cols.insert(map.restore_cols.end(), cols.begin(), cols.end());

        // Rank-compact columns, then order by (aggregated block, local row, local col).
        for (auto& e : row_entries)
            e.col = static_cast<Index>(std::lower_bound(cols.begin(), cols.end(), e.col) - cols.begin());
        std::sort(row_entries.begin(), row_entries.end(), [](const Entry& a, const Entry& c) {
            const Index ba = a.col / kBlockSize, bc = c.col / kBlockSize;
            if (ba != bc)
                return ba < bc;
            if (a.local_row != c.local_row)
                return a.local_row < c.local_row;
            return a.col < c.col;
        });

        for (const auto& e : row_entries) {
            const Index bc = e.col / kBlockSize;
            if (out.blocks.empty() || out.blocks.back().blk_row != br || out.blocks.back().blk_col != bc)
                out.blocks.push_back(Block{static_cast<Index>(br), bc, {}});
            out.blocks.back().elems.push_back(
                {e.local_row, static_cast<std::uint8_t>(e.col % kBlockSize), e.val});
        }
    }
    return {std::move(out), std::move(map)};
}

Index restore_column(const ColumnAggregationMap& map, std::uint64_t blk_row,
                     std::uint64_t aggregated_col) {
    if (blk_row + 1 >= map.cols_offset.size())
        throw Error("block row " + std::to_string(blk_row) + " outside the aggregation map");
    if (aggregated_col >= map.segment_length(blk_row))
        throw Error("aggregated column " + std::to_string(aggregated_col) +
                    " outside segment of block row " + std::to_string(blk_row));
    return map.restore_cols[map.cols_offset[blk_row] + aggregated_col];
}

bool is_valid(const ColumnAggregationMap& map, std::uint64_t blk_m, std::uint64_t n_cols) {
    if (map.cols_offset.size() != blk_m + 1 || map.cols_offset.front() != 0)
        return false;
    if (map.cols_offset.back() != map.restore_cols.size())
        return false;
    for (std::uint64_t i = 0; i < blk_m; ++i) {
        if (map.cols_offset[i + 1] < map.cols_offset[i])
            return false;
        for (auto k = map.cols_offset[i]; k < map.cols_offset[i + 1]; ++k) {
            if (map.restore_cols[k] >= n_cols)
                return false;
            if (k > map.cols_offset[i] && map.restore_cols[k - 1] >= map.restore_cols[k])
                return false;
        }
    }
    return true;
}

}  // namespace cbspmv
