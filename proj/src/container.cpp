#include "cbspmv/container.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "cbspmv/detail/bytes.hpp"
#include "cbspmv/error.hpp"

namespace cbspmv {

namespace {

class Writer {
public:
    template <typename T>
    void put(T v) {
        const auto at = buf_.size();
        buf_.resize(at + sizeof(T));
        detail::store_le<T>(&buf_[at], v);
    }

    template <typename T, typename Range>
    void put_all(const Range& r) {
        for (auto v : r)
            put<T>(static_cast<T>(v));
    }

    void put_bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : buf_(b) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v = detail::load_le<T>(&buf_[pos_]);
        pos_ += sizeof(T);
        return v;
    }

    template <typename T, typename Out>
    void get_all(std::vector<Out>& out, std::uint64_t n) {
        need_elems(n, sizeof(T));
        out.resize(n);
        for (auto& v : out)
            v = static_cast<Out>(get<T>());
    }

    std::span<const std::uint8_t> get_bytes(std::uint64_t n) {
        need(n);
        auto s = buf_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return buf_.size() - pos_; }

private:
    void need(std::uint64_t n) const {
        if (n > remaining())
            throw FormatError("CBSM container truncated at byte " + std::to_string(pos_));
    }
    void need_elems(std::uint64_t n, std::size_t width) const {
        if (n > remaining() / width)
            throw FormatError("CBSM container truncated at byte " + std::to_string(pos_));
    }

    std::span<const std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const PackedMatrix& p) {
    Writer w;
    for (char c : kContainerMagic)
        w.put<std::uint8_t>(static_cast<std::uint8_t>(c));
    w.put<std::uint32_t>(kContainerVersion);
    w.put<std::uint64_t>(p.n_rows);
    w.put<std::uint64_t>(p.n_cols);
    w.put<std::uint64_t>(p.block_count());
    w.put<std::uint64_t>(p.mtx_data.size());
    w.put<std::uint8_t>(p.agg ? 1 : 0);
    w.put<std::uint8_t>(p.schedule ? 1 : 0);

    w.put_all<std::uint32_t>(p.blk_row_idx);
    w.put_all<std::uint32_t>(p.blk_col_idx);
    w.put_all<std::uint32_t>(p.nnz_per_blk);
    for (auto t : p.type_per_blk)
        w.put<std::uint8_t>(static_cast<std::uint8_t>(t));
    w.put_all<std::uint64_t>(p.vp_per_blk);

    if (p.agg) {
        w.put_all<std::uint64_t>(p.agg->cols_offset);
        w.put_all<std::uint32_t>(p.agg->restore_cols);
    }
    if (p.schedule) {
        w.put<std::uint32_t>(p.schedule->warps_per_tb);
        w.put<std::uint64_t>(p.schedule->tb_count);
        w.put_all<std::uint64_t>(p.schedule->slot_of_block);
        w.put_all<std::uint64_t>(p.schedule->load_per_tb);
    }
    w.put_bytes(p.mtx_data);
    return w.take();
}

PackedMatrix deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(std::begin(kContainerMagic), std::end(kContainerMagic), bytes.begin(),
                                        [](char c, std::uint8_t b) { return static_cast<std::uint8_t>(c) == b; }))
        throw FormatError("not a CBSM container: bad magic (expected 'CBSM')");
    Reader r(bytes.subspan(4));
    const auto version = r.get<std::uint32_t>();
    if (version != kContainerVersion)
        throw FormatError("unsupported CBSM version " + std::to_string(version));

    PackedMatrix p;
    p.n_rows = r.get<std::uint64_t>();
    p.n_cols = r.get<std::uint64_t>();
    p.blk_m = blocks_for(p.n_rows);
    p.blk_n = blocks_for(p.n_cols);
    const auto n = r.get<std::uint64_t>();
    const auto data_len = r.get<std::uint64_t>();
    const auto has_agg = r.get<std::uint8_t>();
    const auto has_schedule = r.get<std::uint8_t>();
    if (has_agg > 1 || has_schedule > 1)
        throw FormatError("corrupt CBSM flags");

    r.get_all<std::uint32_t>(p.blk_row_idx, n);
    r.get_all<std::uint32_t>(p.blk_col_idx, n);
    r.get_all<std::uint32_t>(p.nnz_per_blk, n);
    std::vector<std::uint8_t> tags;
    r.get_all<std::uint8_t>(tags, n);
    p.type_per_blk.reserve(n);
    for (auto t : tags) {
        if (t > static_cast<std::uint8_t>(BlockFormat::Dense))
            throw FormatError("corrupt sub-block type tag " + std::to_string(t));
        p.type_per_blk.push_back(static_cast<BlockFormat>(t));
    }
    r.get_all<std::uint64_t>(p.vp_per_blk, n);

    if (has_agg) {
        ColumnAggregationMap m;
        r.get_all<std::uint64_t>(m.cols_offset, p.blk_m + 1);
        r.get_all<std::uint32_t>(m.restore_cols, m.cols_offset.back());
        p.agg = std::move(m);
    }
    if (has_schedule) {
        ThreadBlockSchedule s;
        s.warps_per_tb = r.get<std::uint32_t>();
        s.tb_count = r.get<std::uint64_t>();
        r.get_all<std::uint64_t>(s.slot_of_block, n);
        r.get_all<std::uint64_t>(s.load_per_tb, s.tb_count);
        p.schedule = std::move(s);
    }
    const auto data = r.get_bytes(data_len);
    p.mtx_data.assign(data.begin(), data.end());
    if (r.remaining() != 0)
        throw FormatError("trailing bytes after CBSM payload");

    validate(p);
    return p;
}

void write_container(std::ostream& out, const PackedMatrix& p) {
    const auto bytes = serialize(p);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("failed writing CBSM container");
}

PackedMatrix read_container(std::istream& in) {
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

void write_container_file(const std::string& path, const PackedMatrix& p) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    write_container(out, p);
}

PackedMatrix read_container_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "' for reading");
    try {
        return read_container(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace cbspmv
