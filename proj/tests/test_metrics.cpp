#include <gtest/gtest.h>

#include <random>

#include "cbspmv/cache_sim.hpp"
#include "cbspmv/error.hpp"
#include "cbspmv/pipeline.hpp"
#include "cbspmv/storage_model.hpp"
#include "cbspmv/trace.hpp"
#include "test_support.hpp"

using namespace cbspmv;

TEST(StorageModel, SingleBlockExample) {
    const auto r = storage_model(16, 16, 13, 1, 1);
    EXPECT_EQ(r.csr_bytes, 224u);
    EXPECT_EQ(r.bsr_bytes, 2060u);
    EXPECT_EQ(r.cb_bytes, 138u);
}

TEST(StorageModel, EmptyMatrix) {
    const auto r = storage_model(100, 80, 0, 0, 7);
    EXPECT_EQ(r.csr_bytes, 101u * 4);
    EXPECT_EQ(r.bsr_bytes, 8u * 4);
    EXPECT_EQ(r.cb_bytes, 0u);
}

TEST(StorageModel, LinearInNnz) {
    const auto a = storage_model(500, 500, 1000, 40, 32);
    const auto b = storage_model(500, 500, 2000, 40, 32);
    EXPECT_EQ(b.csr_bytes - a.csr_bytes, 12u * 1000);
    EXPECT_EQ(b.cb_bytes - a.cb_bytes, 9u * 1000);
    EXPECT_EQ(b.bsr_bytes, a.bsr_bytes);
}

TEST(TraceCsr, SingleEntry) {
    const TripletMatrix m{1, 1, {{0, 0, 1.0}}};
    const AccessTrace expected{{0, 4}, {4, 4}, {8, 4}, {12, 8}};
    EXPECT_EQ(trace_csr(m), expected);
}

TEST(TraceCsr, EmptyAndLength) {
    const TripletMatrix empty{3, 3, {}};
    const AccessTrace expected{{0, 4}, {4, 4}, {4, 4}, {8, 4}, {8, 4}, {12, 4}};
    EXPECT_EQ(trace_csr(empty), expected);

    std::mt19937_64 rng(3);
    const auto m = fixtures::random_matrix(rng, 77, 50, 0.1);
    EXPECT_EQ(trace_csr(m).size(), 2 * 77 + 2 * m.nnz());
}

TEST(TraceCb, SingleCooBlock) {
    TripletMatrix m{16, 16, {}};
    for (Index i = 0; i < 8; ++i)
        m.entries.push_back({i, i, 1.0});
    PipelineConfig cfg;
    cfg.aggregation = AggregationMode::Off;
    cfg.balance = false;
    const auto p = build_packed(m, cfg).packed;
    const auto t = trace_cb(p);
    ASSERT_EQ(t.size(), 5u + 16u);
    const AccessTrace meta{{0, 4}, {4, 4}, {8, 4}, {12, 1}, {13, 8}};
    EXPECT_EQ(AccessTrace(t.begin(), t.begin() + 5), meta);
    // mtx_data starts at align_up(21, 8) = 24; values after 8 index bytes
    for (std::uint64_t k = 0; k < 8; ++k) {
        EXPECT_EQ(t[5 + 2 * k], (Access{24 + k, 1}));
        EXPECT_EQ(t[6 + 2 * k], (Access{32 + 8 * k, 8}));
    }
}

TEST(TraceCb, DenseBlockIsSequential) {
    TripletMatrix m{16, 16, {}};
    for (Index i = 0; i < 16; ++i)
        for (Index j = 0; j < 10; ++j)
            m.entries.push_back({i, j, 2.0});
    PipelineConfig cfg;
    cfg.aggregation = AggregationMode::Off;
    const auto p = build_packed(m, cfg).packed;
    ASSERT_EQ(p.type_per_blk[0], BlockFormat::Dense);
    const auto t = trace_cb(p);
    ASSERT_EQ(t.size(), 5u + 256u);
    for (std::uint64_t k = 0; k < 256; ++k)
        EXPECT_EQ(t[5 + k], (Access{24 + 8 * k, 8}));
}

TEST(TraceCb, PayloadBytesExcludePadding) {
    std::mt19937_64 rng(17);
    const auto m = fixtures::block_dense(300, 8, 0.6, rng);
    PipelineConfig cfg;
    cfg.aggregation = AggregationMode::Off;
    const auto p = build_packed(m, cfg).packed;
    const auto t = trace_cb(p);
    std::uint64_t payload = 0;
    const std::uint64_t data_base = (21 * p.block_count() + 7) / 8 * 8;
    for (const auto& a : t)
        if (a.address >= data_base)
            payload += a.size;
    std::uint64_t padding = 0;
    for (std::size_t i = 0; i < p.block_count(); ++i) {
        const auto nnz = p.nnz_per_blk[i];
        if (p.type_per_blk[i] == BlockFormat::Coo)
            padding += coo_padding(nnz);
        else if (p.type_per_blk[i] == BlockFormat::Csr)
            padding += payload_layout(BlockFormat::Csr, nnz).value_offset - (17 + nnz);
    }
    EXPECT_EQ(payload, p.mtx_data.size() - padding);
}

TEST(CacheSim, SequentialBytesOneLine) {
    AccessTrace t;
    for (std::uint64_t a = 0; a < 32; ++a)
        t.push_back({a, 1});
    for (std::uint64_t cap : {1024u, 32768u, 1u << 20}) {
        const auto r = simulate_cache(t, {cap, 128, 8});
        EXPECT_EQ(r.accesses, 32u);
        EXPECT_EQ(r.hits, 31u);
        EXPECT_DOUBLE_EQ(r.hit_rate, 31.0 / 32.0);
    }
}

TEST(CacheSim, DirectMappedThrash) {
    const CacheConfig c{1024, 64, 1};  // 16 sets
    AccessTrace t;
    for (int i = 0; i < 50; ++i)
        t.push_back({static_cast<std::uint64_t>(i % 2) * 1024, 8});
    EXPECT_EQ(simulate_cache(t, c).hit_rate, 0.0);
}

TEST(CacheSim, StraddlingAccessCountsTwice) {
    const AccessTrace t{{124, 8}};
    const auto r = simulate_cache(t, {1024, 128, 2});
    EXPECT_EQ(r.accesses, 2u);
    EXPECT_EQ(r.hits, 0u);
}

TEST(CacheSim, Errors) {
    EXPECT_THROW(simulate_cache({}, kDefaultL1), Error);
    const AccessTrace t{{0, 1}};
    EXPECT_THROW(simulate_cache(t, {1000, 128, 4}), Error);
    EXPECT_THROW(simulate_cache(t, {1024, 96, 4}), Error);
    EXPECT_THROW(simulate_cache(t, {128, 128, 4}), Error);
}

TEST(CacheSim, LargeCacheCountsColdMisses) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::uint64_t> addr(0, 1u << 16);
    AccessTrace t;
    std::set<std::uint64_t> lines;
    for (int i = 0; i < 5000; ++i) {
        const auto a = addr(rng);
        t.push_back({a, 1});
        lines.insert(a / 64);
    }
    const auto r = simulate_cache(t, {1u << 20, 64, 4});
    EXPECT_DOUBLE_EQ(r.hit_rate, 1.0 - static_cast<double>(lines.size()) / 5000.0);
}

TEST(CacheSim, MatchesHistoryOracle) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 12; ++trial) {
        std::uniform_int_distribution<std::uint64_t> addr(0, trial % 2 ? 1u << 14 : 1u << 18);
        std::uniform_int_distribution<int> sz(0, 2);
        AccessTrace t;
        for (int i = 0; i < 3000; ++i)
            t.push_back({addr(rng), std::array<std::uint32_t, 3>{1, 4, 8}[sz(rng)]});
        const CacheConfig c{std::uint64_t{1} << (10 + trial % 4), 64, std::uint64_t{1} << (trial % 3)};
        const auto r = simulate_cache(t, c);
        const auto o = fixtures::lru_history_oracle(t, c.capacity_bytes, c.line_bytes, c.associativity);
        EXPECT_EQ(r.accesses, o.accesses);
        EXPECT_EQ(r.hits, o.hits);
    }
}
