#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cbspmv/triplet.hpp"

namespace cbspmv {

/// Edge length of a sub-block. Local coordinates fit in 4 bits.
inline constexpr std::uint32_t kBlockSize = 16;
inline constexpr std::uint32_t kBlockArea = kBlockSize * kBlockSize;

struct BlockElement {
    std::uint8_t local_row = 0;
    std::uint8_t local_col = 0;
    double val = 0.0;

    friend bool operator==(const BlockElement&, const BlockElement&) = default;
};

/// One non-empty 16x16 sub-block. Elements are sorted by (local_row, local_col).
struct Block {
    Index blk_row = 0;
    Index blk_col = 0;
    std::vector<BlockElement> elems;

    std::size_t nnz() const { return elems.size(); }

    friend bool operator==(const Block&, const Block&) = default;
};

/// Matrix partitioned into 16x16 sub-blocks, HiCOO style. Only non-empty
/// blocks are stored, ordered by (blk_row, blk_col).
struct BlockedCoo {
    std::uint64_t n_rows = 0;
    std::uint64_t n_cols = 0;
    std::uint64_t blk_m = 0;
    std::uint64_t blk_n = 0;
    std::vector<Block> blocks;

    std::size_t nnz() const;

    friend bool operator==(const BlockedCoo&, const BlockedCoo&) = default;
};

struct BlockStats {
    std::size_t total_blocks = 0;
    /// Blocks by nnz in 1-32, 33-64, ..., 225-256.
    std::array<std::size_t, 8> histogram8{};
    /// Refines the first bucket of histogram8: 1-8, 9-16, 17-24, 25-32.
    std::array<std::size_t, 4> histogram_sub4{};
    /// Fraction of non-empty blocks with fewer than 32 non-zeros.
    double super_sparse_fraction = 0.0;
};

constexpr std::uint64_t blocks_for(std::uint64_t dim) {
    return (dim + kBlockSize - 1) / kBlockSize;
}

BlockedCoo partition(const TripletMatrix& m);
TripletMatrix unpartition(const BlockedCoo& b);

/// Throws Error when `b` holds no blocks.
BlockStats compute_block_stats(const BlockedCoo& b);

/// Checks the structural invariants of a BlockedCoo (ordering, local bounds,
/// non-empty blocks, sorted elements). Used by tests and the container reader.
bool is_valid(const BlockedCoo& b);

}  // namespace cbspmv
