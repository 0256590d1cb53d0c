#pragma once

#include <span>
#include <vector>

#include "cbspmv/packing.hpp"
#include "cbspmv/triplet.hpp"

namespace cbspmv {

using DenseVector = std::vector<double>;

enum class ExecMode {
    /// Blocks in stored order, one accumulator. Bit-reproducible.
    Sequential,
    /// Thread blocks run concurrently into private partial outputs which are
    /// merged in ascending tb_id order.
    ParallelTB,
};

struct ExecOptions {
    ExecMode mode = ExecMode::Sequential;
    /// Worker threads for ParallelTB; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

/// Row-wise CSR SpMV, accumulating each row in column-ascending order.
DenseVector spmv_reference_csr(const TripletMatrix& m, std::span<const double> x);

/// SpMV over the packed structure. `x` is indexed by original columns; when
/// the matrix carries a column aggregation map, columns are restored through
/// it. Thread blocks follow the attached schedule if any, otherwise groups
/// of eight consecutive blocks.
DenseVector spmv_cb(const PackedMatrix& p, std::span<const double> x, const ExecOptions& opt = {});

/// As spmv_cb, but requires a load-balancing schedule.
DenseVector spmv_cb_scheduled(const PackedMatrix& p, std::span<const double> x,
                              const ExecOptions& opt = {});

}  // namespace cbspmv
