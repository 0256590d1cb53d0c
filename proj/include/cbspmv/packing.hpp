#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cbspmv/blocking.hpp"
#include "cbspmv/column_aggregation.hpp"
#include "cbspmv/schedule.hpp"

namespace cbspmv {

enum class BlockFormat : std::uint8_t { Coo = 0, Csr = 1, Dense = 2 };

std::string_view to_string(BlockFormat f);

/// Sub-block format thresholds: nnz < th1 is COO, nnz > th2 is DENSE.
struct FormatThresholds {
    std::uint32_t th1 = 32;
    std::uint32_t th2 = 128;
};

/// Throws Error when nnz is outside 1..256.
BlockFormat select_format(std::size_t nnz, const FormatThresholds& th = {});

/// Packs a local coordinate into one byte: row in the low nibble, column in the high nibble.
std::uint8_t encode_coord(unsigned local_row, unsigned local_col);

struct LocalCoord {
    std::uint8_t row;
    std::uint8_t col;
    friend bool operator==(const LocalCoord&, const LocalCoord&) = default;
};

constexpr LocalCoord decode_coord(std::uint8_t v) {
    return {static_cast<std::uint8_t>(v & 15), static_cast<std::uint8_t>(v >> 4)};
}

/// Bytes inserted after nnz one-byte indices so the value array starts on an 8-byte boundary.
constexpr std::size_t coo_padding(std::size_t nnz) {
    const std::size_t r = (nnz * sizeof(std::uint8_t)) % sizeof(double);
    return r ? sizeof(double) - r : 0;
}

inline constexpr std::size_t kCsrRowPtrBytes = kBlockSize + 1;

/// Byte layout of one packed sub-block, relative to its virtual pointer.
///
///   COO:   idx[nnz] (u8 coord) | pad | val[nnz]
///   CSR:   row_ptr[17] (u8) | col[nnz] (u8) | pad | val[nnz]
///   DENSE: val[256], row-major
struct PayloadLayout {
    std::size_t index_offset = 0;
    std::size_t value_offset = 0;
    std::size_t value_count = 0;
    std::size_t size = 0;
};

PayloadLayout payload_layout(BlockFormat f, std::size_t nnz);

/// Encodes `b` in format `f` without consulting thresholds. Any format that
/// can hold the block is accepted.
std::vector<std::uint8_t> encode_payload(const Block& b, BlockFormat f);

/// Encodes `b` in format `f`; throws Error when `f` is not the format the
/// thresholds select for b's nnz.
std::vector<std::uint8_t> pack_block(const Block& b, BlockFormat f, const FormatThresholds& th = {});

/// Decodes a payload back into local elements (sorted by local row, col).
std::vector<BlockElement> decode_payload(std::span<const std::uint8_t> bytes, BlockFormat f,
                                         std::size_t nnz);

/// The CB structure: five per-block arrays and one contiguous payload buffer.
/// vp_per_blk holds byte offsets into mtx_data.
struct PackedMatrix {
    std::uint64_t n_rows = 0;
    std::uint64_t n_cols = 0;
    std::uint64_t blk_m = 0;
    std::uint64_t blk_n = 0;

    std::vector<Index> blk_row_idx;
    std::vector<Index> blk_col_idx;
    std::vector<std::uint32_t> nnz_per_blk;
    std::vector<BlockFormat> type_per_blk;
    std::vector<std::uint64_t> vp_per_blk;
    std::vector<std::uint8_t> mtx_data;

    std::optional<ColumnAggregationMap> agg;
    std::optional<ThreadBlockSchedule> schedule;

    std::size_t block_count() const { return blk_row_idx.size(); }
    std::size_t nnz() const;

    friend bool operator==(const PackedMatrix&, const PackedMatrix&) = default;
};

/// Packs every block with the format chosen by `th`, in stored block order.
PackedMatrix pack_matrix(const BlockedCoo& b, std::optional<ColumnAggregationMap> agg = std::nullopt,
                         const FormatThresholds& th = {});

/// Packs with explicit per-block formats. `formats` has one entry per block.
PackedMatrix pack_matrix_with_formats(const BlockedCoo& b, std::optional<ColumnAggregationMap> agg,
                                      std::span<const BlockFormat> formats);

/// Reconstructs block `i`. Throws FormatError on a corrupt tag or an
/// offset outside mtx_data, Error when i is out of range.
Block unpack_block(const PackedMatrix& p, std::size_t i);

/// Checks array lengths, 8-byte alignment of every vp, in-bounds and
/// pairwise disjoint payload regions, and known type tags.
void validate(const PackedMatrix& p);

}  // namespace cbspmv
