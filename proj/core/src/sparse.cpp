#include "spearlens/sparse.hpp"

#include <cmath>

namespace spearlens {

std::size_t SparseMatrix::nnz() const {
    std::size_t total = 0;
    for (const auto& row : rows) total += row.size();
    return total;
}

double dot(const SparseVector& a, const SparseVector& b) {
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            ++i;
        } else if (a[i].first > b[j].first) {
            ++j;
        } else {
            sum += a[i].second * b[j].second;
            ++i;
            ++j;
        }
    }
    return sum;
}

double norm(const SparseVector& a) {
    double sum = 0.0;
    for (const auto& [col, value] : a) sum += value * value;
    return std::sqrt(sum);
}

}  // namespace spearlens
