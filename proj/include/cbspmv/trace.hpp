#pragma once

#include <cstdint>
#include <vector>

#include "cbspmv/packing.hpp"
#include "cbspmv/triplet.hpp"

namespace cbspmv {

struct Access {
    std::uint64_t address = 0;
    std::uint32_t size = 0;

    friend bool operator==(const Access&, const Access&) = default;
};

using AccessTrace = std::vector<Access>;

/// Matrix-data reads of row-wise CSR SpMV over the flat layout
/// [row_ptr u32[m+1] | col_idx u32[nnz] | csr_val f64[nnz]]. Per row:
/// row_ptr[i], row_ptr[i+1], then col_idx[j], csr_val[j] per element.
AccessTrace trace_csr(const TripletMatrix& m);

/// Matrix-data reads of spmv_cb in sequential block order over the layout
/// [blk_row_idx u32[] | blk_col_idx u32[] | nnz_per_blk u32[] | type u8[] |
///  vp u64[] | mtx_data (8-aligned) | cols_offset u64[] | restore_cols u32[]].
///
/// Per block: the five metadata reads, then payload reads in kernel order.
/// COO reads (index byte, value) pairs; CSR reads the 17 row-pointer bytes,
/// then (column byte, value) pairs; DENSE reads the 256 values. With column
/// aggregation the block also reads cols_offset[blk_row] once and
/// restore_cols once per value that maps to a stored column.
AccessTrace trace_cb(const PackedMatrix& p);

}  // namespace cbspmv
