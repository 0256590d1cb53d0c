#include "cbspmv/pipeline.hpp"

#include <chrono>

#include "cbspmv/balance.hpp"
#include "cbspmv/error.hpp"

namespace cbspmv {

void PipelineConfig::validate() const {
    if (!(th0 >= 0.0 && th0 <= 1.0))
        throw Error("th0 must lie in [0, 1]");
    if (formats.th1 < 1 || formats.th1 > formats.th2 || formats.th2 > kBlockArea)
        throw Error("thresholds must satisfy 1 <= th1 <= th2 <= 256");
    if (warps_per_tb < 1)
        throw Error("warps_per_tb must be at least 1");
}

PipelineResult build_packed(const TripletMatrix& m, const PipelineConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    PipelineReport report;
    BlockedCoo blocked = partition(m);
    if (!blocked.blocks.empty())
        report.stats = compute_block_stats(blocked);

    bool aggregate = false;
    switch (cfg.aggregation) {
    case AggregationMode::On:
        aggregate = true;
        break;
    case AggregationMode::Off:
        aggregate = false;
        break;
    case AggregationMode::Auto:
        aggregate = report.stats && should_aggregate(*report.stats, cfg.th0);
        break;
    }

    std::optional<ColumnAggregationMap> agg;
    if (aggregate) {
        auto [aggregated, map] = aggregate_columns(blocked);
        blocked = std::move(aggregated);
        agg = std::move(map);
    }

    PackedMatrix packed = pack_matrix(blocked, std::move(agg), cfg.formats);
    if (cfg.balance)
        packed = balance(std::move(packed), cfg.warps_per_tb);

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.blocks = packed.block_count();
    report.nnz = packed.nnz();
    report.aggregation_applied = aggregate;
    report.balanced = cfg.balance;
    for (auto f : packed.type_per_blk)
        report.format_counts[static_cast<std::size_t>(f)] += 1;
    return {std::move(packed), report};
}

}  // namespace cbspmv
