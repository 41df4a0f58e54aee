#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "spearlens/sparse.hpp"

namespace spearlens {

struct SvdOptions {
    int k = 1;
    std::uint64_t seed = 42;

    // Randomized range-finder parameters: Gaussian test matrix with
    // `oversampling` extra columns and `power_iterations` warm-up sweeps,
    // then further sweeps until the top-k singular values move by less than
    // `tolerance` (relative to sigma_1) or `max_iterations` is hit.
    int oversampling = 10;
    int power_iterations = 4;
    int max_iterations = 300;
    double tolerance = 1e-10;

    // Exact dense bidiagonalization is used when min(N, M) is at or below
    // this cutoff; the randomized solver handles everything larger.
    std::size_t dense_cutoff = 200;

    enum class Method { Auto, Dense, Randomized };
    Method method = Method::Auto;
};

struct SvdResult {
    Eigen::VectorXd singular_values;  // nonincreasing, length k
    Eigen::MatrixXd u;                // n_rows x k, orthonormal columns
    Eigen::MatrixXd v;                // n_cols x k, orthonormal columns
};

// Top-k singular triples of a sparse matrix. Deterministic per seed. Signs
// are fixed so each right singular vector's largest-magnitude entry is
// nonnegative. Throws ValidationError for k outside [1, min(N, M)] and
// ConvergenceError when the randomized solver exhausts its budget.
SvdResult truncated_svd(const SparseMatrix& a, const SvdOptions& options);

}  // namespace spearlens
