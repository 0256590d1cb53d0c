#include "cbspmv/spmv.hpp"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>
#include <utility>

#include "cbspmv/detail/bytes.hpp"
#include "cbspmv/error.hpp"

namespace cbspmv {

using detail::load_f64;

DenseVector spmv_reference_csr(const TripletMatrix& m, std::span<const double> x) {
    if (x.size() != m.n_cols)
        throw DimensionMismatch("x has length " + std::to_string(x.size()) + ", matrix has " +
                                std::to_string(m.n_cols) + " columns");
    std::vector<std::uint64_t> row_ptr(m.n_rows + 1, 0);
    for (const auto& t : m.entries)
        row_ptr[t.row + 1] += 1;
    for (std::uint64_t i = 0; i < m.n_rows; ++i)
        row_ptr[i + 1] += row_ptr[i];

    // Canonical entries are (row, col)-sorted, so they already are col_idx/csr_val.
    DenseVector y(m.n_rows, 0.0);
    for (std::uint64_t i = 0; i < m.n_rows; ++i) {
        double sum = 0.0;
        for (auto j = row_ptr[i]; j < row_ptr[i + 1]; ++j)
            sum += x[m.entries[j].col] * m.entries[j].val;
        y[i] = sum;
    }
    return y;
}

namespace {

// Emulates one warp processing one sub-block. Every contribution to y goes
// through `add(row, value)`, the stand-in for atomicAdd.
class BlockKernel {
public:
    BlockKernel(const PackedMatrix& p, std::span<const double> x) : p_(p), x_(x) {}

    template <typename Add>
    void run(std::size_t i, Add&& add) const {
        const std::uint32_t nnz = p_.nnz_per_blk[i];
        const BlockFormat f = p_.type_per_blk[i];
        const PayloadLayout l = payload_layout(f, nnz);
        const std::uint64_t vp = p_.vp_per_blk[i];
        if (vp > p_.mtx_data.size() || p_.mtx_data.size() - vp < l.size)
            throw FormatError("virtual pointer of block " + std::to_string(i) + " out of bounds");
        const std::uint8_t* base = p_.mtx_data.data() + vp;
        const std::uint64_t blk_row = p_.blk_row_idx[i];
        const std::uint64_t row0 = blk_row * kBlockSize;
        const std::uint64_t col0 = std::uint64_t{p_.blk_col_idx[i]} * kBlockSize;

        std::uint64_t col_limit = p_.n_cols;
        const Index* restore = nullptr;
        if (p_.agg) {
            col_limit = p_.agg->segment_length(blk_row);
            restore = p_.agg->restore_cols.data() + p_.agg->cols_offset[blk_row];
        }
        auto x_at = [&](std::uint64_t col) {
            return restore ? x_[restore[col]] : x_[col];
        };
        auto checked_row = [&](std::uint64_t r) {
            if (r >= p_.n_rows)
                throw FormatError("block " + std::to_string(i) + " writes past the last row");
            return r;
        };
        auto checked_col = [&](std::uint64_t c) {
            if (c >= col_limit)
                throw FormatError("block " + std::to_string(i) + " reads past the last column");
            return c;
        };

        switch (f) {
        case BlockFormat::Coo: {
            const std::uint8_t* idx = base + l.index_offset;
            const std::uint8_t* val = base + l.value_offset;
            for (std::uint32_t k = 0; k < nnz; ++k) {
                const LocalCoord c = decode_coord(idx[k]);
                const std::uint64_t col = checked_col(col0 + c.col);
                add(checked_row(row0 + c.row), load_f64(val + 8 * k) * x_at(col));
            }
            break;
        }
        case BlockFormat::Csr: {
            const std::uint8_t* row_ptr = base;
            const std::uint8_t* cols = base + kCsrRowPtrBytes;
            const std::uint8_t* val = base + l.value_offset;
            for (std::uint32_t r = 0; r < kBlockSize; ++r) {
                const std::uint32_t begin = row_ptr[r];
                const std::uint32_t end = r + 1 == kBlockSize ? nnz : row_ptr[r + 1];
                if (begin == end)
                    continue;
                if (end < begin || end > nnz)
                    throw FormatError("corrupt CSR row pointer in block " + std::to_string(i));
                double sum = 0.0;
                for (std::uint32_t k = begin; k < end; ++k) {
                    if (cols[k] >= kBlockSize)
                        throw FormatError("corrupt CSR column index in block " + std::to_string(i));
                    sum += load_f64(val + 8 * k) * x_at(checked_col(col0 + cols[k]));
                }
                add(checked_row(row0 + r), sum);
            }
            break;
        }
        case BlockFormat::Dense: {
            // Lane t < 16 covers columns 0..7 of row t, lane t + 16 columns
            // 8..15; the shuffle adds the two halves.
            const std::uint64_t width = col0 >= col_limit ? 0 : std::min<std::uint64_t>(kBlockSize, col_limit - col0);
            constexpr std::uint32_t half = kBlockSize / 2;
            for (std::uint32_t r = 0; r < kBlockSize; ++r) {
                const std::uint8_t* row_vals = base + 8 * (r * kBlockSize);
                double lo = 0.0, hi = 0.0;
                for (std::uint32_t c = 0; c < half && c < width; ++c)
                    lo += load_f64(row_vals + 8 * c) * x_at(col0 + c);
                for (std::uint32_t c = half; c < kBlockSize && c < width; ++c)
                    hi += load_f64(row_vals + 8 * c) * x_at(col0 + c);
                if (row0 + r < p_.n_rows)
                    add(row0 + r, lo + hi);
            }
            break;
        }
        default:
            throw FormatError("unknown format tag in block " + std::to_string(i));
        }
    }

private:
    const PackedMatrix& p_;
    std::span<const double> x_;
};

struct Contribution {
    std::uint64_t row;
    double val;
};

// Per-row partial sums of one thread block, rows ascending.
std::vector<Contribution> run_thread_block(const BlockKernel& kernel, std::size_t first, std::size_t last) {
    std::vector<Contribution> raw;
    for (std::size_t i = first; i < last; ++i)
        kernel.run(i, [&](std::uint64_t row, double v) { raw.push_back({row, v}); });
    std::stable_sort(raw.begin(), raw.end(),
                     [](const Contribution& a, const Contribution& b) { return a.row < b.row; });
    std::vector<Contribution> partial;
    for (const auto& c : raw) {
        if (!partial.empty() && partial.back().row == c.row)
            partial.back().val += c.val;
        else
            partial.push_back(c);
    }
    return partial;
}

// Contiguous [first, last) block ranges per thread block.
std::vector<std::pair<std::size_t, std::size_t>> thread_block_ranges(const PackedMatrix& p) {
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    const std::size_t n = p.block_count();
    if (p.schedule) {
        const auto& s = *p.schedule;
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i + 1;
            while (j < n && s.tb_of(j) == s.tb_of(i))
                ++j;
            ranges.emplace_back(i, j);
            i = j;
        }
    } else {
        for (std::size_t i = 0; i < n; i += kWarpsPerThreadBlock)
            ranges.emplace_back(i, std::min<std::size_t>(n, i + kWarpsPerThreadBlock));
    }
    return ranges;
}

}  // namespace

DenseVector spmv_cb(const PackedMatrix& p, std::span<const double> x, const ExecOptions& opt) {
    if (x.size() != p.n_cols)
        throw DimensionMismatch("x has length " + std::to_string(x.size()) + ", matrix has " +
                                std::to_string(p.n_cols) + " columns");
    if (p.agg && p.agg->cols_offset.size() != p.blk_m + 1)
        throw FormatError("column aggregation map does not match the block grid");

    DenseVector y(p.n_rows, 0.0);
    const BlockKernel kernel(p, x);

    if (opt.mode == ExecMode::Sequential) {
        for (std::size_t i = 0; i < p.block_count(); ++i)
            kernel.run(i, [&](std::uint64_t row, double v) { y[row] += v; });
        return y;
    }

    const auto ranges = thread_block_ranges(p);
    std::vector<std::vector<Contribution>> partials(ranges.size());
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, ranges.size())));

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t tb = begin; tb < end; ++tb)
            partials[tb] = run_thread_block(kernel, ranges[tb].first, ranges[tb].second);
    };
    if (threads <= 1) {
        work(0, ranges.size());
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::jthread> pool;
        const std::size_t chunk = (ranges.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t b = std::min(ranges.size(), t * chunk);
            const std::size_t e = std::min(ranges.size(), b + chunk);
            pool.emplace_back([&, t, b, e] {
                try {
                    work(b, e);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& err : errors)
            if (err)
                std::rethrow_exception(err);
    }

    for (const auto& partial : partials)
        for (const auto& c : partial)
            y[c.row] += c.val;
    return y;
}

DenseVector spmv_cb_scheduled(const PackedMatrix& p, std::span<const double> x, const ExecOptions& opt) {
    if (!p.schedule)
        throw Error("matrix has no thread-block schedule; run balance first");
    return spmv_cb(p, x, opt);
}

}  // namespace cbspmv
