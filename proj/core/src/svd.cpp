#include "spearlens/svd.hpp"

#include <algorithm>
#include <random>

#include "spearlens/errors.hpp"

namespace spearlens {

namespace {

Eigen::MatrixXd to_dense(const SparseMatrix& a) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(a.n_rows()),
        static_cast<Eigen::Index>(a.n_cols));
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
        for (const auto& [col, value] : a.rows[i]) {
            dense(static_cast<Eigen::Index>(i),
                  static_cast<Eigen::Index>(col)) = value;
        }
    }
    return dense;
}

// y = a * x
Eigen::MatrixXd multiply(const SparseMatrix& a, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.n_rows()), x.cols());
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
        auto row = y.row(static_cast<Eigen::Index>(i));
        for (const auto& [col, value] : a.rows[i]) {
            row += value * x.row(static_cast<Eigen::Index>(col));
        }
    }
    return y;
}

// y = a^T * x
Eigen::MatrixXd multiply_transposed(const SparseMatrix& a,
                                    const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.n_cols), x.cols());
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
        const auto row = x.row(static_cast<Eigen::Index>(i));
        for (const auto& [col, value] : a.rows[i]) {
            y.row(static_cast<Eigen::Index>(col)) += value * row;
        }
    }
    return y;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(y.rows(), y.cols());
    q.applyOnTheLeft(qr.householderQ());
    return q;
}

// Flips signs so each right singular vector's largest-magnitude entry is
// nonnegative (first occurrence wins on ties), keeping u consistent.
void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        Eigen::Index best = 0;
        double best_mag = -1.0;
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            const double mag = std::abs(v(i, j));
            if (mag > best_mag) {
                best_mag = mag;
                best = i;
            }
        }
        if (v(best, j) < 0.0) {
            v.col(j) = -v.col(j);
            u.col(j) = -u.col(j);
        }
    }
}

SvdResult dense_svd(const SparseMatrix& a, int k) {
    const Eigen::MatrixXd dense = to_dense(a);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult result;
    result.singular_values = svd.singularValues().head(k);
    result.u = svd.matrixU().leftCols(k);
    result.v = svd.matrixV().leftCols(k);
    return result;
}

SvdResult randomized_svd(const SparseMatrix& a, const SvdOptions& options) {
    const auto n_rows = static_cast<Eigen::Index>(a.n_rows());
    const auto n_cols = static_cast<Eigen::Index>(a.n_cols);
    const int k = options.k;
    const Eigen::Index ell = std::min<Eigen::Index>(
        k + options.oversampling, std::min(n_rows, n_cols));

    // Gaussian test matrix, filled row-major so the draw order is pinned.
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd omega(n_cols, ell);
    for (Eigen::Index i = 0; i < n_cols; ++i) {
        for (Eigen::Index j = 0; j < ell; ++j) omega(i, j) = gauss(rng);
    }

    Eigen::MatrixXd q = orthonormalize(multiply(a, omega));
    int iterations = 0;
    for (; iterations < options.power_iterations; ++iterations) {
        q = orthonormalize(multiply_transposed(a, q));
        q = orthonormalize(multiply(a, q));
    }

    // Rayleigh-Ritz on the sketched range, with extra power sweeps until the
    // leading singular values stop moving.
    Eigen::VectorXd sigma_prev;
    double residual = 0.0;
    while (true) {
        const Eigen::MatrixXd bt = multiply_transposed(a, q);  // n_cols x ell
        Eigen::BDCSVD<Eigen::MatrixXd> svd(
            bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd sigma = svd.singularValues().head(k);

        if (sigma_prev.size() > 0) {
            const double scale = std::max(sigma(0), 1e-300);
            residual = ((sigma - sigma_prev).cwiseAbs() / scale).maxCoeff();
            if (residual < options.tolerance) {
                SvdResult result;
                result.singular_values = sigma;
                result.v = svd.matrixU().leftCols(k);          // right vectors of a
                result.u = q * svd.matrixV().leftCols(k);      // left vectors of a
                return result;
            }
        }
        if (iterations >= options.max_iterations) {
            throw ConvergenceError(
                "randomized SVD did not converge within " +
                    std::to_string(options.max_iterations) +
                    " iterations (last relative sigma change " +
                    std::to_string(residual) + ")",
                residual);
        }
        sigma_prev = sigma;
        q = orthonormalize(multiply(a, bt));
        ++iterations;
    }
}

}  // namespace

SvdResult truncated_svd(const SparseMatrix& a, const SvdOptions& options) {
    const std::size_t min_dim = std::min(a.n_rows(), a.n_cols);
    if (min_dim == 0) {
        throw ValidationError("SVD of an empty matrix");
    }
    if (options.k < 1 || static_cast<std::size_t>(options.k) > min_dim) {
        throw ValidationError("SVD rank k=" + std::to_string(options.k) +
                              " out of range [1, " + std::to_string(min_dim) +
                              "]");
    }

    const bool dense =
        options.method == SvdOptions::Method::Dense ||
        (options.method == SvdOptions::Method::Auto &&
         min_dim <= options.dense_cutoff);

    SvdResult result =
        dense ? dense_svd(a, options.k) : randomized_svd(a, options);
    fix_signs(result.u, result.v);
    return result;
}

}  // namespace spearlens
