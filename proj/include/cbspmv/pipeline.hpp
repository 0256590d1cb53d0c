#pragma once

#include <array>
#include <optional>

#include "cbspmv/blocking.hpp"
#include "cbspmv/column_aggregation.hpp"
#include "cbspmv/packing.hpp"
#include "cbspmv/schedule.hpp"
#include "cbspmv/spmv.hpp"

namespace cbspmv {

enum class AggregationMode { Auto, On, Off };

struct PipelineConfig {
    double th0 = kDefaultAggregationThreshold;
    FormatThresholds formats{};
    std::uint32_t warps_per_tb = kWarpsPerThreadBlock;
    ExecOptions exec{};
    AggregationMode aggregation = AggregationMode::Auto;
    bool balance = true;

    /// Throws Error unless 0 <= th0 <= 1, 1 <= th1 <= th2 <= 256 and warps_per_tb >= 1.
    void validate() const;
};

struct PipelineReport {
    std::size_t blocks = 0;
    std::size_t nnz = 0;
    /// Absent for a matrix without non-zeros.
    std::optional<BlockStats> stats;
    bool aggregation_applied = false;
    bool balanced = false;
    /// Blocks per format, indexed by BlockFormat.
    std::array<std::size_t, 3> format_counts{};
    double seconds = 0.0;
};

struct PipelineResult {
    PackedMatrix packed;
    PipelineReport report;
};

/// Partition, optional column aggregation, format selection and packing,
/// optional thread-block balancing.
PipelineResult build_packed(const TripletMatrix& m, const PipelineConfig& cfg = {});

}  // namespace cbspmv
