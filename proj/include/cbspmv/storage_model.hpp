#pragma once

#include <cstdint>

namespace cbspmv {

/// Modeled storage footprint (int32 indices, FP64 values) of CSR, 16x16 BSR
/// and the CB structure with every sub-block in COO.
struct StorageReport {
    std::uint64_t m = 0;
    std::uint64_t n = 0;
    std::uint64_t nnz = 0;
    std::uint64_t nnzb = 0;
    std::uint64_t blk_m = 0;

    std::uint64_t csr_bytes = 0;
    std::uint64_t bsr_bytes = 0;
    std::uint64_t cb_bytes = 0;
};

StorageReport storage_model(std::uint64_t m, std::uint64_t n, std::uint64_t nnz, std::uint64_t nnzb,
                            std::uint64_t blk_m);

}  // namespace cbspmv
