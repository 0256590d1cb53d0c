#include "cbspmv/packing.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "cbspmv/detail/bytes.hpp"
#include "cbspmv/error.hpp"

namespace cbspmv {

using detail::align_up;
using detail::load_f64;
using detail::store_f64;

std::string_view to_string(BlockFormat f) {
    switch (f) {
    case BlockFormat::Coo:
        return "coo";
    case BlockFormat::Csr:
        return "csr";
    case BlockFormat::Dense:
        return "dense";
    }
    return "unknown";
}

BlockFormat select_format(std::size_t nnz, const FormatThresholds& th) {
    if (nnz < 1 || nnz > kBlockArea)
        throw Error("sub-block nnz " + std::to_string(nnz) + " outside 1..256");
    if (nnz < th.th1)
        return BlockFormat::Coo;
    if (nnz > th.th2)
        return BlockFormat::Dense;
    return BlockFormat::Csr;
}

std::uint8_t encode_coord(unsigned local_row, unsigned local_col) {
    if (local_row >= kBlockSize || local_col >= kBlockSize)
        throw Error("local coordinate (" + std::to_string(local_row) + ", " +
                    std::to_string(local_col) + ") outside 0..15");
    return static_cast<std::uint8_t>((local_col << 4) | local_row);
}

PayloadLayout payload_layout(BlockFormat f, std::size_t nnz) {
    PayloadLayout l;
    switch (f) {
    case BlockFormat::Coo:
        l.index_offset = 0;
        l.value_offset = nnz + coo_padding(nnz);
        l.value_count = nnz;
        break;
    case BlockFormat::Csr:
        l.index_offset = 0;
        l.value_offset = align_up(kCsrRowPtrBytes + nnz, sizeof(double));
        l.value_count = nnz;
        break;
    case BlockFormat::Dense:
        l.index_offset = 0;
        l.value_offset = 0;
        l.value_count = kBlockArea;
        break;
    default:
        throw FormatError("unknown sub-block format tag " + std::to_string(static_cast<int>(f)));
    }
    l.size = l.value_offset + l.value_count * sizeof(double);
    return l;
}

std::vector<std::uint8_t> encode_payload(const Block& b, BlockFormat f) {
    const std::size_t nnz = b.nnz();
    if (nnz < 1 || nnz > kBlockArea)
        throw Error("sub-block nnz " + std::to_string(nnz) + " outside 1..256");
    const PayloadLayout l = payload_layout(f, nnz);
    std::vector<std::uint8_t> out(l.size, 0);

    switch (f) {
    case BlockFormat::Coo:
        for (std::size_t k = 0; k < nnz; ++k) {
            const auto& e = b.elems[k];
            out[l.index_offset + k] = encode_coord(e.local_row, e.local_col);
            store_f64(&out[l.value_offset + 8 * k], e.val);
        }
        break;
    case BlockFormat::Csr: {
        std::array<std::uint32_t, kCsrRowPtrBytes> row_ptr{};
        for (const auto& e : b.elems)
            row_ptr[e.local_row + 1] += 1;
        for (std::size_t r = 0; r < kBlockSize; ++r)
            row_ptr[r + 1] += row_ptr[r];
        // row_ptr[16] == nnz only reaches 256 for a full block; its byte wraps
        // to 0 and readers take the row end from nnz_per_blk instead.
        for (std::size_t r = 0; r < kCsrRowPtrBytes; ++r)
            out[r] = static_cast<std::uint8_t>(row_ptr[r]);
        for (std::size_t k = 0; k < nnz; ++k) {
            const auto& e = b.elems[k];
            if (e.local_col >= kBlockSize)
                throw Error("local column outside 0..15");
            out[kCsrRowPtrBytes + k] = e.local_col;
            store_f64(&out[l.value_offset + 8 * k], e.val);
        }
        break;
    }
    case BlockFormat::Dense:
        for (const auto& e : b.elems) {
            if (e.local_row >= kBlockSize || e.local_col >= kBlockSize)
                throw Error("local coordinate outside 0..15");
            store_f64(&out[8 * (e.local_row * kBlockSize + e.local_col)], e.val);
        }
        break;
    }
    return out;
}

std::vector<std::uint8_t> pack_block(const Block& b, BlockFormat f, const FormatThresholds& th) {
    const BlockFormat expected = select_format(b.nnz(), th);
    if (expected != f)
        throw Error("format " + std::string(to_string(f)) + " does not match nnz " +
                    std::to_string(b.nnz()) + " (expected " + std::string(to_string(expected)) + ")");
    return encode_payload(b, f);
}

std::vector<BlockElement> decode_payload(std::span<const std::uint8_t> bytes, BlockFormat f,
                                         std::size_t nnz) {
    const PayloadLayout l = payload_layout(f, nnz);
    if (bytes.size() < l.size)
        throw FormatError("sub-block payload truncated: need " + std::to_string(l.size) +
                          " bytes, have " + std::to_string(bytes.size()));
    std::vector<BlockElement> out;
    switch (f) {
    case BlockFormat::Coo:
        out.reserve(nnz);
        for (std::size_t k = 0; k < nnz; ++k) {
            const LocalCoord c = decode_coord(bytes[l.index_offset + k]);
            out.push_back({c.row, c.col, load_f64(&bytes[l.value_offset + 8 * k])});
        }
        break;
    case BlockFormat::Csr: {
        if (bytes[0] != 0 || bytes[kBlockSize] != static_cast<std::uint8_t>(nnz))
            throw FormatError("corrupt CSR sub-block row pointer");
        out.reserve(nnz);
        for (std::size_t r = 0; r < kBlockSize; ++r) {
            const std::size_t begin = bytes[r];
            const std::size_t end = r + 1 == kBlockSize ? nnz : bytes[r + 1];
            if (end < begin || end > nnz)
                throw FormatError("corrupt CSR sub-block row pointer");
            for (std::size_t k = begin; k < end; ++k) {
                const std::uint8_t col = bytes[kCsrRowPtrBytes + k];
                if (col >= kBlockSize)
                    throw FormatError("corrupt CSR sub-block column index");
                out.push_back({static_cast<std::uint8_t>(r), col,
                               load_f64(&bytes[l.value_offset + 8 * k])});
            }
        }
        break;
    }
    case BlockFormat::Dense:
        for (std::size_t k = 0; k < kBlockArea; ++k) {
            const double v = load_f64(&bytes[8 * k]);
            if (v != 0.0)
                out.push_back({static_cast<std::uint8_t>(k / kBlockSize),
                               static_cast<std::uint8_t>(k % kBlockSize), v});
        }
        break;
    }
    return out;
}

std::size_t PackedMatrix::nnz() const {
    std::size_t n = 0;
    for (auto k : nnz_per_blk)
        n += k;
    return n;
}

PackedMatrix pack_matrix(const BlockedCoo& b, std::optional<ColumnAggregationMap> agg,
                         const FormatThresholds& th) {
    std::vector<BlockFormat> formats;
    formats.reserve(b.blocks.size());
    for (const auto& blk : b.blocks)
        formats.push_back(select_format(blk.nnz(), th));
    return pack_matrix_with_formats(b, std::move(agg), formats);
}

PackedMatrix pack_matrix_with_formats(const BlockedCoo& b, std::optional<ColumnAggregationMap> agg,
                                      std::span<const BlockFormat> formats) {
    if (formats.size() != b.blocks.size())
        throw Error("one format per block required");
    PackedMatrix p;
    p.n_rows = b.n_rows;
    p.n_cols = b.n_cols;
    p.blk_m = b.blk_m;
    p.blk_n = b.blk_n;
    p.agg = std::move(agg);

    const std::size_t n = b.blocks.size();
    p.blk_row_idx.reserve(n);
    p.blk_col_idx.reserve(n);
    p.nnz_per_blk.reserve(n);
    p.type_per_blk.reserve(n);
    p.vp_per_blk.reserve(n);

    std::uint64_t offset = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& blk = b.blocks[i];
        p.blk_row_idx.push_back(blk.blk_row);
        p.blk_col_idx.push_back(blk.blk_col);
        p.nnz_per_blk.push_back(static_cast<std::uint32_t>(blk.nnz()));
        p.type_per_blk.push_back(formats[i]);
        p.vp_per_blk.push_back(offset);
        offset += align_up(payload_layout(formats[i], blk.nnz()).size, sizeof(double));
    }

    p.mtx_data.assign(offset, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto bytes = encode_payload(b.blocks[i], formats[i]);
        std::copy(bytes.begin(), bytes.end(), p.mtx_data.begin() + static_cast<std::ptrdiff_t>(p.vp_per_blk[i]));
    }
    return p;
}

Block unpack_block(const PackedMatrix& p, std::size_t i) {
    if (i >= p.block_count())
        throw Error("block index " + std::to_string(i) + " out of range");
    const BlockFormat f = p.type_per_blk[i];
    const PayloadLayout l = payload_layout(f, p.nnz_per_blk[i]);
    const std::uint64_t vp = p.vp_per_blk[i];
    if (vp > p.mtx_data.size() || p.mtx_data.size() - vp < l.size)
        throw FormatError("virtual pointer of block " + std::to_string(i) + " out of bounds");
    Block b;
    b.blk_row = p.blk_row_idx[i];
    b.blk_col = p.blk_col_idx[i];
    b.elems = decode_payload(std::span(p.mtx_data).subspan(vp, l.size), f, p.nnz_per_blk[i]);
    return b;
}

void validate(const PackedMatrix& p) {
    const std::size_t n = p.block_count();
    if (p.blk_col_idx.size() != n || p.nnz_per_blk.size() != n || p.type_per_blk.size() != n ||
        p.vp_per_blk.size() != n)
        throw FormatError("per-block arrays differ in length");
    if (p.blk_m != blocks_for(p.n_rows) || p.blk_n != blocks_for(p.n_cols))
        throw FormatError("block grid does not match matrix dimensions");

    std::vector<std::pair<std::uint64_t, std::uint64_t>> regions;
    regions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (p.blk_row_idx[i] >= p.blk_m || p.blk_col_idx[i] >= p.blk_n)
            throw FormatError("block " + std::to_string(i) + " outside the block grid");
        if (p.nnz_per_blk[i] < 1 || p.nnz_per_blk[i] > kBlockArea)
            throw FormatError("block " + std::to_string(i) + " has nnz outside 1..256");
        const PayloadLayout l = payload_layout(p.type_per_blk[i], p.nnz_per_blk[i]);
        const std::uint64_t vp = p.vp_per_blk[i];
        if (vp % sizeof(double) != 0)
            throw FormatError("virtual pointer of block " + std::to_string(i) + " is not 8-byte aligned");
        if (vp > p.mtx_data.size() || p.mtx_data.size() - vp < l.size)
            throw FormatError("virtual pointer of block " + std::to_string(i) + " out of bounds");
        regions.emplace_back(vp, vp + l.size);
    }
    std::sort(regions.begin(), regions.end());
    for (std::size_t i = 1; i < regions.size(); ++i)
        if (regions[i].first < regions[i - 1].second)
            throw FormatError("sub-block payload regions overlap");

    if (p.agg && !is_valid(*p.agg, p.blk_m, p.n_cols))
        throw FormatError("invalid column aggregation map");
    if (p.schedule) {
        const auto& s = *p.schedule;
        if (s.warps_per_tb == 0 || s.slot_of_block.size() != n || s.load_per_tb.size() != s.tb_count)
            throw FormatError("schedule does not match block count");
        for (std::size_t i = 0; i < n; ++i) {
            if (s.tb_of(i) >= s.tb_count)
                throw FormatError("schedule slot outside thread-block range");
            if (i > 0 && s.slot_of_block[i] <= s.slot_of_block[i - 1])
                throw FormatError("blocks are not stored in schedule slot order");
        }
    }
}

}  // namespace cbspmv
