#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace spearlens {

// One document's feature vector: (column, weight) pairs sorted by column.
// Zero entries are implicit.
using SparseEntry = std::pair<std::uint32_t, double>;
using SparseVector = std::vector<SparseEntry>;

struct SparseMatrix {
    std::size_t n_cols = 0;
    std::vector<SparseVector> rows;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t nnz() const;
};

double dot(const SparseVector& a, const SparseVector& b);
double norm(const SparseVector& a);

}  // namespace spearlens
