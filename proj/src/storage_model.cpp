#include "cbspmv/storage_model.hpp"

namespace cbspmv {

StorageReport storage_model(std::uint64_t m, std::uint64_t n, std::uint64_t nnz, std::uint64_t nnzb,
                            std::uint64_t blk_m) {
    StorageReport r{m, n, nnz, nnzb, blk_m, 0, 0, 0};
    // row_ptr + col_idx + csr_val
    r.csr_bytes = (m + 1) * 4 + nnz * 4 + nnz * 8;
    // dense 16x16 FP64 tiles + blk_row_ptr + blk_col_idx
    r.bsr_bytes = 256 * 8 * nnzb + (blk_m + 1) * 4 + nnzb * 4;
    // per block: row, col, nnz (4 each), type (1), vp (8); per element: coord byte + value
    r.cb_bytes = nnzb * (4 + 4 + 4 + 1 + 8) + nnz * (1 + 8);
    return r;
}

}  // namespace cbspmv
