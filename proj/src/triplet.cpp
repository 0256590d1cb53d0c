#include "cbspmv/triplet.hpp"

#include <algorithm>

namespace cbspmv {

namespace {

bool coord_less(const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
}

}  // namespace

void canonicalize(TripletMatrix& m) {
    auto& e = m.entries;
    std::stable_sort(e.begin(), e.end(), coord_less);

    std::size_t out = 0;
    for (std::size_t i = 0; i < e.size();) {
        Triplet t = e[i];
        std::size_t j = i + 1;
        for (; j < e.size() && e[j].row == t.row && e[j].col == t.col; ++j)
            t.val += e[j].val;
        if (t.val != 0.0)
            e[out++] = t;
        i = j;
    }
    e.resize(out);
}

bool is_canonical(const TripletMatrix& m) {
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        const auto& t = m.entries[i];
        if (t.row >= m.n_rows || t.col >= m.n_cols || t.val == 0.0)
            return false;
        if (i > 0 && !coord_less(m.entries[i - 1], t))
            return false;
    }
    return true;
}

}  // namespace cbspmv
