#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cbspmv/packing.hpp"

namespace cbspmv {

inline constexpr char kContainerMagic[4] = {'C', 'B', 'S', 'M'};
inline constexpr std::uint32_t kContainerVersion = 1;

/// Serializes a PackedMatrix as a little-endian CBSM container:
///
///   "CBSM" | version u32 | n_rows u64 | n_cols u64 | block_count u64 |
///   mtx_data_len u64 | has_agg u8 | has_schedule u8 |
///   blk_row_idx u32[] | blk_col_idx u32[] | nnz_per_blk u32[] |
///   type_per_blk u8[] | vp_per_blk u64[] |
///   [cols_offset u64[blk_m+1] | restore_cols u32[cols_offset[blk_m]]] |
///   [warps_per_tb u32 | tb_count u64 | slot_of_block u64[] | load_per_tb u64[]] |
///   mtx_data
std::vector<std::uint8_t> serialize(const PackedMatrix& p);

/// Parses and validates a container. Throws FormatError on bad magic,
/// unsupported version, truncation or inconsistent contents.
PackedMatrix deserialize(std::span<const std::uint8_t> bytes);

void write_container(std::ostream& out, const PackedMatrix& p);
PackedMatrix read_container(std::istream& in);

void write_container_file(const std::string& path, const PackedMatrix& p);
PackedMatrix read_container_file(const std::string& path);

}  // namespace cbspmv
