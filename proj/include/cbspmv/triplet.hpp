#pragma once

#include <cstdint>
#include <vector>

namespace cbspmv {

using Index = std::uint32_t;

struct Triplet {
    Index row = 0;
    Index col = 0;
    double val = 0.0;

    friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Coordinate-format matrix with 0-based indices.
///
/// A canonical matrix has its entries sorted by (row, col), holds no
/// duplicate coordinates and no explicit zeros. Every downstream stage
/// assumes canonical input.
struct TripletMatrix {
    std::uint64_t n_rows = 0;
    std::uint64_t n_cols = 0;
    std::vector<Triplet> entries;

    std::size_t nnz() const { return entries.size(); }

    friend bool operator==(const TripletMatrix&, const TripletMatrix&) = default;
};

/// Sorts by (row, col), sums duplicates and drops entries whose value is exactly 0.0.
void canonicalize(TripletMatrix& m);

bool is_canonical(const TripletMatrix& m);

}  // namespace cbspmv
