#include <gtest/gtest.h>

#include <random>

#include "cbspmv/balance.hpp"
#include "cbspmv/error.hpp"
#include "cbspmv/pipeline.hpp"
#include "cbspmv/spmv.hpp"
#include "test_support.hpp"

using namespace cbspmv;

TEST(ReferenceCsr, Basics) {
    const auto a = fixtures::from_dense({{1, 2}, {0, 3}});
    EXPECT_EQ(spmv_reference_csr(a, std::vector<double>{1, 1}), (DenseVector{3, 3}));

    const TripletMatrix zero{3, 4, {}};
    EXPECT_EQ(spmv_reference_csr(zero, std::vector<double>{1, 2, 3, 4}), (DenseVector{0, 0, 0}));

    const auto id = fixtures::identity(5);
    const std::vector<double> x{1.5, -2, 3, 0.25, 9};
    EXPECT_EQ(spmv_reference_csr(id, x), x);

    EXPECT_THROW(spmv_reference_csr(id, std::vector<double>{1, 2}), DimensionMismatch);
}

TEST(ReferenceCsr, AgreesWithDenseProduct) {
    std::mt19937_64 rng(1);
    const auto m = fixtures::random_matrix(rng, 120, 90, 0.1);
    const auto x = fixtures::random_vector(rng, 90);
    EXPECT_LE(fixtures::relative_linf(spmv_reference_csr(m, x), fixtures::dense_spmv(m, x)), 1e-14);
}

TEST(SpmvCb, IdentityForcedCsr) {
    const auto b = partition(fixtures::identity(16));
    const std::vector<BlockFormat> csr{BlockFormat::Csr};
    const auto p = pack_matrix_with_formats(b, std::nullopt, csr);
    EXPECT_EQ(spmv_cb(p, std::vector<double>(16, 1.0)), DenseVector(16, 1.0));
    const std::vector<BlockFormat> dense{BlockFormat::Dense};
    const auto pd = pack_matrix_with_formats(b, std::nullopt, dense);
    EXPECT_EQ(spmv_cb(pd, std::vector<double>(16, 1.0)), DenseVector(16, 1.0));
}

TEST(SpmvCb, ForcedFormatsAgreeOnBoundaryMatrix) {
    std::mt19937_64 rng(4);
    const auto m = fixtures::random_matrix(rng, 37, 45, 0.3);
    const auto x = fixtures::random_vector(rng, 45);
    const auto ref = spmv_reference_csr(m, x);
    for (bool aggregate : {false, true}) {
        auto b = partition(m);
        std::optional<ColumnAggregationMap> agg;
        if (aggregate) {
            auto [ab, map] = aggregate_columns(b);
            b = ab;
            agg = map;
        }
        for (auto f : {BlockFormat::Coo, BlockFormat::Csr, BlockFormat::Dense}) {
            const std::vector<BlockFormat> formats(b.blocks.size(), f);
            const auto p = pack_matrix_with_formats(b, agg, formats);
            EXPECT_LE(fixtures::relative_linf(spmv_cb(p, x), ref), 1e-12) << to_string(f);
        }
    }
}

TEST(SpmvCb, MatchesReferenceAllVariants) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 25; ++trial) {
        std::uniform_int_distribution<int> dim(1, 500);
        std::uniform_real_distribution<double> ld(-4, -1);
        auto m = trial % 5 == 0 ? fixtures::block_dense(200, 16, 0.8, rng)
                                : fixtures::random_matrix(rng, dim(rng), dim(rng), std::pow(10.0, ld(rng)));
        const auto x = fixtures::random_vector(rng, m.n_cols);
        const auto ref = spmv_reference_csr(m, x);
        for (auto agg : {AggregationMode::Off, AggregationMode::On})
            for (bool bal : {false, true}) {
                PipelineConfig cfg;
                cfg.aggregation = agg;
                cfg.balance = bal;
                const auto p = build_packed(m, cfg).packed;
                EXPECT_LE(fixtures::relative_linf(spmv_cb(p, x), ref), 1e-12);
                const auto par = spmv_cb(p, x, {ExecMode::ParallelTB, 3});
                EXPECT_LE(fixtures::relative_linf(par, ref), 1e-10);
                EXPECT_LE(fixtures::relative_linf(par, spmv_cb(p, x)), 1e-10);
                EXPECT_EQ(par, spmv_cb(p, x, {ExecMode::ParallelTB, 1}));
            }
    }
}

TEST(SpmvCb, SequentialIsBitReproducible) {
    std::mt19937_64 rng(12);
    const auto m = fixtures::random_matrix(rng, 300, 300, 0.05);
    const auto x = fixtures::random_vector(rng, 300);
    const auto p = build_packed(m).packed;
    EXPECT_EQ(spmv_cb(p, x), spmv_cb(p, x));
}

TEST(SpmvCb, PowerOfTwoLinearity) {
    std::mt19937_64 rng(13);
    const auto m = fixtures::block_dense(150, 16, 0.5, rng);
    const auto x = fixtures::random_vector(rng, m.n_cols);
    const auto p = build_packed(m).packed;
    const auto y = spmv_cb(p, x);
    for (double alpha : {2.0, 0.25, -8.0, 1024.0}) {
        std::vector<double> ax(x);
        for (auto& v : ax)
            v *= alpha;
        const auto ya = spmv_cb(p, ax);
        for (std::size_t i = 0; i < y.size(); ++i)
            EXPECT_EQ(ya[i], alpha * y[i]);
    }
}

TEST(SpmvCb, EmptyMatrixGivesZero) {
    const TripletMatrix m{40, 17, {}};
    const auto p = build_packed(m).packed;
    EXPECT_EQ(spmv_cb(p, std::vector<double>(17, 3.0)), DenseVector(40, 0.0));
    EXPECT_EQ(spmv_cb(p, std::vector<double>(17, 3.0), {ExecMode::ParallelTB, 2}), DenseVector(40, 0.0));
}

TEST(SpmvCb, DimensionMismatch) {
    const auto p = build_packed(fixtures::identity(20)).packed;
    EXPECT_THROW(spmv_cb(p, std::vector<double>(19, 1.0)), DimensionMismatch);
}

TEST(SpmvCb, CorruptPointerDetected) {
    auto p = build_packed(fixtures::identity(20), {.balance = false}).packed;
    p.vp_per_blk[1] = p.mtx_data.size();
    EXPECT_THROW(spmv_cb(p, std::vector<double>(20, 1.0)), FormatError);
}

TEST(SpmvCbScheduled, RequiresSchedule) {
    PipelineConfig cfg;
    cfg.balance = false;
    const auto p = build_packed(fixtures::identity(20), cfg).packed;
    EXPECT_THROW(spmv_cb_scheduled(p, std::vector<double>(20, 1.0)), Error);
}

TEST(SpmvCbScheduled, SingleBlockMatchesUnscheduled) {
    const auto m = fixtures::identity(16);
    PipelineConfig cfg;
    cfg.balance = false;
    const auto plain = build_packed(m, cfg).packed;
    const auto sched = balance(plain);
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    EXPECT_EQ(spmv_cb_scheduled(sched, x), spmv_cb(plain, x));
}

TEST(SpmvCbScheduled, BlockShuffleStress) {
    std::mt19937_64 rng(21);
    const auto m = fixtures::random_matrix(rng, 400, 400, 0.03);
    const auto x = fixtures::random_vector(rng, 400);
    const auto ref = spmv_reference_csr(m, x);
    PipelineConfig cfg;
    cfg.balance = false;
    const auto p = build_packed(m, cfg).packed;
    for (int round = 0; round < 5; ++round) {
        std::vector<std::size_t> perm(p.block_count());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        PackedMatrix q = p;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            q.blk_row_idx[i] = p.blk_row_idx[perm[i]];
            q.blk_col_idx[i] = p.blk_col_idx[perm[i]];
            q.nnz_per_blk[i] = p.nnz_per_blk[perm[i]];
            q.type_per_blk[i] = p.type_per_blk[perm[i]];
            q.vp_per_blk[i] = p.vp_per_blk[perm[i]];
        }
        EXPECT_LE(fixtures::relative_linf(spmv_cb(q, x), ref), 1e-12);
        const auto bq = balance(q);
        EXPECT_LE(fixtures::relative_linf(spmv_cb_scheduled(bq, x), ref), 1e-12);
        EXPECT_LE(fixtures::relative_linf(spmv_cb_scheduled(bq, x, {ExecMode::ParallelTB, 4}), ref), 1e-10);
    }
}
