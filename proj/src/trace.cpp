#include "cbspmv/trace.hpp"

#include "cbspmv/detail/bytes.hpp"

namespace cbspmv {

AccessTrace trace_csr(const TripletMatrix& m) {
    const std::uint64_t col_base = (m.n_rows + 1) * 4;
    const std::uint64_t val_base = col_base + m.nnz() * 4;

    AccessTrace t;
    t.reserve(2 * m.n_rows + 2 * m.nnz());
    std::size_t j = 0;
    for (std::uint64_t i = 0; i < m.n_rows; ++i) {
        t.push_back({i * 4, 4});
        t.push_back({(i + 1) * 4, 4});
        for (; j < m.entries.size() && m.entries[j].row == i; ++j) {
            t.push_back({col_base + j * 4, 4});
            t.push_back({val_base + j * 8, 8});
        }
    }
    return t;
}

AccessTrace trace_cb(const PackedMatrix& p) {
    const std::uint64_t n = p.block_count();
    const std::uint64_t row_base = 0;
    const std::uint64_t col_base = row_base + 4 * n;
    const std::uint64_t nnz_base = col_base + 4 * n;
    const std::uint64_t type_base = nnz_base + 4 * n;
    const std::uint64_t vp_base = type_base + n;
    const std::uint64_t data_base = detail::align_up(vp_base + 8 * n, 8);

    AccessTrace t;
    t.reserve(5 * n + 2 * p.nnz());
    for (std::uint64_t i = 0; i < n; ++i) {
        t.push_back({row_base + 4 * i, 4});
        t.push_back({col_base + 4 * i, 4});
        t.push_back({nnz_base + 4 * i, 4});
        t.push_back({type_base + i, 1});
        t.push_back({vp_base + 8 * i, 8});

        const std::uint32_t nnz = p.nnz_per_blk[i];
        const PayloadLayout l = payload_layout(p.type_per_blk[i], nnz);
        const std::uint64_t base = data_base + p.vp_per_blk[i];
        switch (p.type_per_blk[i]) {
        case BlockFormat::Coo:
            for (std::uint32_t k = 0; k < nnz; ++k) {
                t.push_back({base + l.index_offset + k, 1});
                t.push_back({base + l.value_offset + 8 * k, 8});
            }
            break;
        case BlockFormat::Csr:
            for (std::uint64_t r = 0; r < kCsrRowPtrBytes; ++r)
                t.push_back({base + r, 1});
            for (std::uint32_t k = 0; k < nnz; ++k) {
                t.push_back({base + kCsrRowPtrBytes + k, 1});
                t.push_back({base + l.value_offset + 8 * k, 8});
            }
            break;
        case BlockFormat::Dense:
            for (std::uint64_t k = 0; k < kBlockArea; ++k) {
                t.push_back({base + 8 * k, 8});
            }
            break;
        }
    }
    return t;
}

}  // namespace cbspmv
