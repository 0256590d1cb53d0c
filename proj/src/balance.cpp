#include "cbspmv/balance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <tuple>

#include "cbspmv/error.hpp"

namespace cbspmv {

LoadStats load_stats(std::span<const std::uint64_t> loads) {
    LoadStats s;
    if (loads.empty())
        return s;
    const double n = static_cast<double>(loads.size());
    double sum = 0.0;
    for (auto v : loads)
        sum += static_cast<double>(v);
    s.mean = sum / n;
    double sq = 0.0;
    for (auto v : loads) {
        const double d = static_cast<double>(v) - s.mean;
        sq += d * d;
    }
    s.stddev = std::sqrt(sq / n);
    const auto [lo, hi] = std::minmax_element(loads.begin(), loads.end());
    s.min = *lo;
    s.max = *hi;
    return s;
}

std::vector<std::uint64_t> contiguous_loads(std::span<const std::uint32_t> nnz_per_blk,
                                            std::uint32_t warps_per_tb) {
    if (warps_per_tb == 0)
        throw Error("warps_per_tb must be at least 1");
    std::vector<std::uint64_t> loads((nnz_per_blk.size() + warps_per_tb - 1) / warps_per_tb, 0);
    for (std::size_t i = 0; i < nnz_per_blk.size(); ++i)
        loads[i / warps_per_tb] += nnz_per_blk[i];
    return loads;
}

std::vector<std::uint64_t> assign_slots(std::span<const std::uint32_t> nnz_per_blk,
                                        std::uint32_t warps_per_tb) {
    if (warps_per_tb == 0)
        throw Error("warps_per_tb must be at least 1");
    const std::size_t n = nnz_per_blk.size();
    const std::uint64_t tb_count = (n + warps_per_tb - 1) / warps_per_tb;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return nnz_per_blk[a] > nnz_per_blk[b]; });

    // (load, tb_id, warps) min-heap; lexicographic order breaks load ties by tb_id.
    using Entry = std::tuple<std::uint64_t, std::uint64_t, std::uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    for (std::uint64_t tb = 0; tb < tb_count; ++tb)
        pq.emplace(0, tb, 0);

    std::vector<std::uint64_t> slots(n);
    for (std::size_t blk : order) {
        auto [load, tb, warps] = pq.top();
        pq.pop();
        slots[blk] = tb * warps_per_tb + warps;
        load += nnz_per_blk[blk];
        ++warps;
        if (warps < warps_per_tb)
            pq.emplace(load, tb, warps);
    }
    return slots;
}

PackedMatrix balance(PackedMatrix p, std::uint32_t warps_per_tb) {
    const std::size_t n = p.block_count();
    const auto slots = assign_slots(p.nnz_per_blk, warps_per_tb);

    std::vector<std::size_t> by_slot(n);
    std::iota(by_slot.begin(), by_slot.end(), std::size_t{0});
    std::sort(by_slot.begin(), by_slot.end(),
              [&](std::size_t a, std::size_t b) { return slots[a] < slots[b]; });

    auto permute = [&](auto& arr) {
        auto old = arr;
        for (std::size_t i = 0; i < n; ++i)
            arr[i] = old[by_slot[i]];
    };
    permute(p.blk_row_idx);
    permute(p.blk_col_idx);
    permute(p.nnz_per_blk);
    permute(p.type_per_blk);
    permute(p.vp_per_blk);

    ThreadBlockSchedule s;
    s.warps_per_tb = warps_per_tb;
    s.tb_count = (n + warps_per_tb - 1) / warps_per_tb;
    s.load_per_tb.assign(s.tb_count, 0);
    s.slot_of_block.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.slot_of_block[i] = slots[by_slot[i]];
        s.load_per_tb[s.tb_of(i)] += p.nnz_per_blk[i];
    }
    p.schedule = std::move(s);
    return p;
}

}  // namespace cbspmv
