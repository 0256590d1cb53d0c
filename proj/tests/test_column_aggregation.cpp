#include <gtest/gtest.h>

#include <random>

#include "cbspmv/blocking.hpp"
#include "cbspmv/column_aggregation.hpp"
#include "cbspmv/error.hpp"
#include "test_support.hpp"

using namespace cbspmv;

TEST(ColumnAggregation, Threshold) {
    BlockStats s;
    s.super_sparse_fraction = 0.90;
    EXPECT_TRUE(should_aggregate(s));
    s.super_sparse_fraction = 0.0;
    EXPECT_FALSE(should_aggregate(s));
    s.super_sparse_fraction = 0.15;
    EXPECT_TRUE(should_aggregate(s));
    s.super_sparse_fraction = 0.1499999;
    EXPECT_FALSE(should_aggregate(s));
}

TEST(ColumnAggregation, CompactsSparseBlockRow) {
    TripletMatrix m{16, 48, {{0, 0, 1.0}, {0, 4, 2.0}, {3, 9, 3.0}, {5, 37, 4.0}}};
    const auto [agg, map] = aggregate_columns(partition(m));
    EXPECT_EQ(map.cols_offset, (std::vector<std::uint64_t>{0, 4}));
    EXPECT_EQ(map.restore_cols, (std::vector<Index>{0, 4, 9, 37}));
    ASSERT_EQ(agg.blocks.size(), 1u);
    EXPECT_EQ(agg.blocks[0].blk_col, 0u);
    const std::vector<BlockElement> expected{{0, 0, 1.0}, {0, 1, 2.0}, {3, 2, 3.0}, {5, 3, 4.0}};
    EXPECT_EQ(agg.blocks[0].elems, expected);
}

TEST(ColumnAggregation, DenseBlockRowUnchanged) {
    TripletMatrix m{16, 16, {}};
    for (Index c = 0; c < 16; ++c)
        m.entries.push_back({static_cast<Index>(c % 3), c, 1.0 + c});
    canonicalize(m);
    const auto b = partition(m);
    const auto [agg, map] = aggregate_columns(b);
    EXPECT_EQ(agg, b);
    EXPECT_EQ(map.restore_cols.size(), 16u);
}

TEST(ColumnAggregation, StridedColumnsCollapse) {
    for (Index k : {0u, 5u, 15u, 16u, 40u}) {
        TripletMatrix m{16, 16 * (k + 1), {}};
        for (Index j = 0; j <= k; ++j)
            m.entries.push_back({static_cast<Index>(j % 16), 16 * j, 1.0});
        canonicalize(m);
        const auto b = partition(m);
        EXPECT_EQ(b.blocks.size(), k + 1);
        const auto [agg, map] = aggregate_columns(b);
        EXPECT_EQ(agg.blocks.size(), (k + 1 + 15) / 16) << "k=" << k;
        EXPECT_TRUE(is_valid(agg));
    }
}

TEST(ColumnAggregation, RestoreColumn) {
    ColumnAggregationMap map{{0, 4, 5}, {0, 4, 9, 37, 5}};
    EXPECT_EQ(restore_column(map, 0, 2), 9u);
    EXPECT_EQ(restore_column(map, 1, 0), 5u);
    EXPECT_THROW(restore_column(map, 0, 4), Error);
    EXPECT_THROW(restore_column(map, 1, 1), Error);
    EXPECT_THROW(restore_column(map, 2, 0), Error);
}

TEST(ColumnAggregation, PropertiesAgainstRankOracle) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> dim(1, 400);
        std::uniform_real_distribution<double> dens(0.001, 0.08);
        const auto m = fixtures::random_matrix(rng, dim(rng), dim(rng), dens(rng));
        const auto b = partition(m);
        const auto [agg, map] = aggregate_columns(b);
        ASSERT_TRUE(is_valid(agg));
        ASSERT_TRUE(is_valid(map, b.blk_m, b.n_cols));
        EXPECT_EQ(agg.nnz(), m.nnz());

        const auto oracle = fixtures::nonzero_columns_per_block_row(m);
        for (std::uint64_t br = 0; br < b.blk_m; ++br) {
            const auto it = oracle.find(br);
            const std::vector<Index> expected = it == oracle.end() ? std::vector<Index>{} : it->second;
            const std::vector<Index> seg(map.restore_cols.begin() + map.cols_offset[br],
                                         map.restore_cols.begin() + map.cols_offset[br + 1]);
            EXPECT_EQ(seg, expected);
            // restore is the left inverse of rank compaction
            for (std::size_t k = 0; k < expected.size(); ++k)
                EXPECT_EQ(restore_column(map, br, k), expected[k]);

            std::size_t before = 0, after = 0, nnz_before = 0, nnz_after = 0;
            for (const auto& blk : b.blocks)
                if (blk.blk_row == br)
                    ++before, nnz_before += blk.nnz();
            for (const auto& blk : agg.blocks)
                if (blk.blk_row == br) {
                    ++after, nnz_after += blk.nnz();
                    if ((std::uint64_t{blk.blk_col} + 1) * 16 <= map.segment_length(br))
                        EXPECT_GE(blk.nnz(), 16u);
                }
            EXPECT_LE(after, before);
            EXPECT_EQ(nnz_after, nnz_before);
        }

        // Mapping aggregated entries back reproduces the matrix.
        TripletMatrix restored{m.n_rows, m.n_cols, {}};
        for (const auto& blk : agg.blocks)
            for (const auto& e : blk.elems)
                restored.entries.push_back({blk.blk_row * 16 + e.local_row,
                                            restore_column(map, blk.blk_row, blk.blk_col * 16 + e.local_col),
                                            e.val});
        canonicalize(restored);
        EXPECT_EQ(restored, m);
    }
}
