#include "cbspmv/blocking.hpp"

#include <algorithm>

#include "cbspmv/error.hpp"

namespace cbspmv {

std::size_t BlockedCoo::nnz() const {
    std::size_t n = 0;
    for (const auto& b : blocks)
        n += b.nnz();
    return n;
}

BlockedCoo partition(const TripletMatrix& m) {
    BlockedCoo out;
    out.n_rows = m.n_rows;
    out.n_cols = m.n_cols;
    out.blk_m = blocks_for(m.n_rows);
    out.blk_n = blocks_for(m.n_cols);

    // Sort entry positions by block key, then by local coordinate. Canonical
    // input is already (row, col)-sorted, so a stable sort on the block key
    // keeps local order.
    std::vector<std::size_t> order(m.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    auto key = [&](std::size_t i) {
        const auto& t = m.entries[i];
        return std::pair{t.row / kBlockSize, t.col / kBlockSize};
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

    for (std::size_t i : order) {
        const auto& t = m.entries[i];
        const Index br = t.row / kBlockSize;
        const Index bc = t.col / kBlockSize;
        if (out.blocks.empty() || out.blocks.back().blk_row != br || out.blocks.back().blk_col != bc)
            out.blocks.push_back(Block{br, bc, {}});
        out.blocks.back().elems.push_back({static_cast<std::uint8_t>(t.row % kBlockSize),
                                           static_cast<std::uint8_t>(t.col % kBlockSize), t.val});
    }
    return out;
}

TripletMatrix unpartition(const BlockedCoo& b) {
    TripletMatrix m;
    m.n_rows = b.n_rows;
    m.n_cols = b.n_cols;
    m.entries.reserve(b.nnz());
    for (const auto& blk : b.blocks)
        for (const auto& e : blk.elems)
            m.entries.push_back({blk.blk_row * kBlockSize + e.local_row,
                                 blk.blk_col * kBlockSize + e.local_col, e.val});
    canonicalize(m);
    return m;
}

BlockStats compute_block_stats(const BlockedCoo& b) {
    if (b.blocks.empty())
        throw Error("block statistics are undefined for a matrix without non-zero blocks");
    BlockStats s;
    s.total_blocks = b.blocks.size();
    std::size_t super_sparse = 0;
    for (const auto& blk : b.blocks) {
        const std::size_t k = blk.nnz();
        s.histogram8[(k - 1) / 32] += 1;
        if (k <= 32)
            s.histogram_sub4[(k - 1) / 8] += 1;
        if (k < 32)
            ++super_sparse;
    }
    s.super_sparse_fraction = static_cast<double>(super_sparse) / static_cast<double>(s.total_blocks);
    return s;
}

bool is_valid(const BlockedCoo& b) {
    if (b.blk_m != blocks_for(b.n_rows) || b.blk_n != blocks_for(b.n_cols))
        return false;
    for (std::size_t i = 0; i < b.blocks.size(); ++i) {
        const auto& blk = b.blocks[i];
        if (blk.elems.empty() || blk.elems.size() > kBlockArea)
            return false;
        if (blk.blk_row >= b.blk_m || blk.blk_col >= b.blk_n)
            return false;
        if (i > 0) {
            const auto& prev = b.blocks[i - 1];
            if (std::pair{prev.blk_row, prev.blk_col} >= std::pair{blk.blk_row, blk.blk_col})
                return false;
        }
        for (std::size_t j = 0; j < blk.elems.size(); ++j) {
            const auto& e = blk.elems[j];
            if (e.local_row >= kBlockSize || e.local_col >= kBlockSize)
                return false;
            if (std::uint64_t{blk.blk_row} * kBlockSize + e.local_row >= b.n_rows ||
                std::uint64_t{blk.blk_col} * kBlockSize + e.local_col >= b.n_cols)
                return false;
            if (j > 0) {
                const auto& p = blk.elems[j - 1];
                if (std::pair{p.local_row, p.local_col} >= std::pair{e.local_row, e.local_col})
                    return false;
            }
        }
    }
    return true;
}

}  // namespace cbspmv
