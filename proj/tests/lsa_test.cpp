#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spearlens/errors.hpp"
#include "spearlens/lsa.hpp"
#include "spearlens/svd.hpp"
#include "spearlens/synth.hpp"

using namespace spearlens;

namespace {

SvdOptions options_for(int k, std::uint64_t seed = 42) {
    SvdOptions options;
    options.k = k;
    options.seed = seed;
    return options;
}

double max_orthonormality_error(const Eigen::MatrixXd& q) {
    const Eigen::MatrixXd gram = q.transpose() * q;
    return (gram - Eigen::MatrixXd::Identity(q.cols(), q.cols()))
        .cwiseAbs()
        .maxCoeff();
}

// Builds a matrix with a known spectrum from two random orthonormal factors.
Eigen::MatrixXd with_spectrum(std::mt19937_64& rng, Eigen::Index m,
                              Eigen::Index n,
                              const Eigen::VectorXd& spectrum) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd gu(m, spectrum.size()), gv(n, spectrum.size());
    for (Eigen::Index i = 0; i < gu.rows(); ++i) {
        for (Eigen::Index j = 0; j < gu.cols(); ++j) gu(i, j) = gauss(rng);
    }
    for (Eigen::Index i = 0; i < gv.rows(); ++i) {
        for (Eigen::Index j = 0; j < gv.cols(); ++j) gv(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qru(gu), qrv(gv);
    Eigen::MatrixXd u = Eigen::MatrixXd::Identity(m, spectrum.size());
    u.applyOnTheLeft(qru.householderQ());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, spectrum.size());
    v.applyOnTheLeft(qrv.householderQ());
    return u * spectrum.asDiagonal() * v.transpose();
}

SparseMatrix sparse_from_eigen(const Eigen::MatrixXd& a) {
    SparseMatrix sparse;
    sparse.n_cols = static_cast<std::size_t>(a.cols());
    sparse.rows.resize(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (a(i, j) != 0.0) {
                sparse.rows[static_cast<std::size_t>(i)].emplace_back(
                    static_cast<std::uint32_t>(j), a(i, j));
            }
        }
    }
    return sparse;
}

TfIdfMatrix small_tfidf(int seed = 42) {
    SynthConfig config;
    config.n_topics = 2;
    config.n_adversaries = 8;
    config.n_targets = 12;
    config.vocab_per_topic = 40;
    config.shared_vocab = 20;
    config.doc_length = 40;
    config.targeting_strength = 1.0;
    config.emails_per_adversary = 2;
    config.seed = static_cast<std::uint64_t>(seed);
    const CampaignManifest manifest = generate(config);
    return fit_transform(ngram_streams(manifest, 1, StopWordSet{}));
}

}  // namespace

TEST_CASE("identity matrix has unit singular values") {
    SparseMatrix eye;
    eye.n_cols = 5;
    eye.rows.resize(5);
    for (std::uint32_t i = 0; i < 5; ++i) eye.rows[i] = {{i, 1.0}};
    const SvdResult svd = truncated_svd(eye, options_for(5));
    for (int j = 0; j < 5; ++j) {
        CHECK(svd.singular_values(j) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rank-1 matrix: sigma1 = |a||b|, sigma2 ~ 0") {
    const std::vector<double> a = {1.0, -2.0, 0.5, 3.0};
    const std::vector<double> b = {2.0, 1.0, -1.5};
    oracles::DenseMatrix outer(a.size(), std::vector<double>(b.size()));
    double na = 0.0, nb = 0.0;
    for (double x : a) na += x * x;
    for (double x : b) nb += x * x;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) outer[i][j] = a[i] * b[j];
    }
    const SvdResult svd =
        truncated_svd(oracles::to_sparse(outer), options_for(2));
    CHECK(svd.singular_values(0) ==
          doctest::Approx(std::sqrt(na) * std::sqrt(nb)).epsilon(1e-12));
    CHECK(svd.singular_values(1) <= 1e-8);
}

TEST_CASE("singular values match the Jacobi oracle on random matrices") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 4 + rng() % 17;  // up to 20
        const std::size_t n = 4 + rng() % 17;
        const auto dense = oracles::random_dense(rng, m, n);
        const auto oracle = oracles::jacobi_svd(dense);

        const int k = 3 <= std::min(m, n) ? 3 : 1;
        const SvdResult svd =
            truncated_svd(oracles::to_sparse(dense), options_for(k));
        for (int j = 0; j < k; ++j) {
            CHECK(std::abs(svd.singular_values(j) -
                           oracle.singular_values[j]) < 1e-8);
        }
        CHECK(max_orthonormality_error(svd.u) < 1e-8);
        CHECK(max_orthonormality_error(svd.v) < 1e-8);
        CHECK(std::is_sorted(svd.singular_values.begin(),
                             svd.singular_values.end(), std::greater<>()));
    }
}

TEST_CASE("Eckart-Young: truncation residual equals the sigma tail") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 6 + rng() % 15;  // up to 20
        const std::size_t n = 6 + rng() % 15;
        const auto dense = oracles::random_dense(rng, m, n);
        const auto oracle = oracles::jacobi_svd(dense);

        const std::size_t k = 2 + rng() % (std::min(m, n) - 2);
        const SvdResult svd = truncated_svd(oracles::to_sparse(dense),
                                            options_for(static_cast<int>(k)));

        // Residual of the implementation's truncation...
        oracles::DenseMatrix u(m, std::vector<double>(k));
        oracles::DenseMatrix v(n, std::vector<double>(k));
        std::vector<double> sigma(k);
        for (std::size_t j = 0; j < k; ++j) {
            sigma[j] = svd.singular_values(static_cast<Eigen::Index>(j));
            for (std::size_t i = 0; i < m; ++i) {
                u[i][j] = svd.u(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(j));
            }
            for (std::size_t i = 0; i < n; ++i) {
                v[i][j] = svd.v(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(j));
            }
        }
        const double residual = oracles::frobenius_norm(
            oracles::truncation_residual(dense, u, sigma, v, k));

        // ...must equal the oracle's sigma tail.
        double tail = 0.0;
        for (std::size_t j = k; j < oracle.singular_values.size(); ++j) {
            tail += oracle.singular_values[j] * oracle.singular_values[j];
        }
        CHECK(std::abs(residual - std::sqrt(tail)) < 1e-8);
    }
}

TEST_CASE("sign convention and per-seed reproducibility") {
    std::mt19937_64 rng(43);
    const auto dense = oracles::random_dense(rng, 12, 9);
    const SparseMatrix sparse = oracles::to_sparse(dense);

    const SvdResult first = truncated_svd(sparse, options_for(4, 7));
    const SvdResult second = truncated_svd(sparse, options_for(4, 7));
    CHECK(first.singular_values == second.singular_values);
    CHECK(first.u == second.u);
    CHECK(first.v == second.v);

    for (Eigen::Index j = 0; j < first.v.cols(); ++j) {
        Eigen::Index best = 0;
        first.v.col(j).cwiseAbs().maxCoeff(&best);
        CHECK(first.v(best, j) >= 0.0);
    }
}

TEST_CASE("randomized solver matches the known spectrum past the dense cutoff") {
    std::mt19937_64 rng(44);
    Eigen::VectorXd spectrum(30);
    for (int j = 0; j < spectrum.size(); ++j) {
        spectrum(j) = 8.0 * std::pow(0.75, j);
    }
    const Eigen::MatrixXd dense = with_spectrum(rng, 230, 210, spectrum);
    const SparseMatrix sparse = sparse_from_eigen(dense);

    SvdOptions options = options_for(6, 11);
    options.method = SvdOptions::Method::Randomized;
    const SvdResult svd = truncated_svd(sparse, options);
    for (int j = 0; j < 6; ++j) {
        CHECK(svd.singular_values(j) ==
              doctest::Approx(spectrum(j)).epsilon(1e-7));
    }
    CHECK(max_orthonormality_error(svd.u) < 1e-8);
    CHECK(max_orthonormality_error(svd.v) < 1e-8);

    // The auto heuristic picks the same answer through the dense path.
    const SvdResult dense_result = truncated_svd(sparse, options_for(6, 11));
    for (int j = 0; j < 6; ++j) {
        CHECK(std::abs(svd.singular_values(j) -
                       dense_result.singular_values(j)) < 1e-7);
    }
}

TEST_CASE("randomized solver is reproducible per seed") {
    std::mt19937_64 rng(45);
    const auto dense = oracles::random_dense(rng, 40, 35);
    SvdOptions options = options_for(5, 123);
    options.method = SvdOptions::Method::Randomized;
    const SvdResult first = truncated_svd(oracles::to_sparse(dense), options);
    const SvdResult second = truncated_svd(oracles::to_sparse(dense), options);
    CHECK(first.singular_values == second.singular_values);
    CHECK(first.u == second.u);
    CHECK(first.v == second.v);
}

TEST_CASE("rank validation and convergence budget") {
    std::mt19937_64 rng(46);
    const auto dense = oracles::random_dense(rng, 6, 5);
    const SparseMatrix sparse = oracles::to_sparse(dense);
    CHECK_THROWS_AS(truncated_svd(sparse, options_for(0)), ValidationError);
    CHECK_THROWS_AS(truncated_svd(sparse, options_for(6)), ValidationError);
    CHECK_THROWS_AS(truncated_svd(SparseMatrix{}, options_for(1)),
                    ValidationError);

    SvdOptions exhausted = options_for(2);
    exhausted.method = SvdOptions::Method::Randomized;
    exhausted.power_iterations = 0;
    exhausted.max_iterations = 0;
    CHECK_THROWS_AS(truncated_svd(sparse, exhausted), ConvergenceError);
}

TEST_CASE("lsa model wires the factorization to document ids") {
    const TfIdfMatrix matrix = small_tfidf();
    const int k = 5;
    const LsaModel model = truncated_svd(matrix, k, 42);

    CHECK(model.k == k);
    CHECK(model.singular_values.size() == static_cast<std::size_t>(k));
    CHECK(model.doc_ids == matrix.doc_ids);
    CHECK(model.doc_coords.rows() ==
          static_cast<Eigen::Index>(matrix.n_docs()));
    CHECK(model.term_weights.rows() ==
          static_cast<Eigen::Index>(matrix.n_grams()));
    CHECK(std::is_sorted(model.singular_values.begin(),
                         model.singular_values.end(), std::greater<>()));
}

TEST_CASE("doc coordinates contract the tf-idf row norms") {
    const TfIdfMatrix matrix = small_tfidf();
    const LsaModel model = truncated_svd(matrix, 6, 42);
    for (std::size_t i = 0; i < matrix.n_docs(); ++i) {
        const double coord_norm =
            model.doc_coords.row(static_cast<Eigen::Index>(i)).norm();
        CHECK(coord_norm <= norm(matrix.matrix.rows[i]) + 1e-8);
    }
}

TEST_CASE("doc coordinates equal the reconstructed row times V") {
    const TfIdfMatrix matrix = small_tfidf();
    const LsaModel model = truncated_svd(matrix, 4, 42);
    const Eigen::MatrixXd reconstructed =
        model.doc_coords * model.term_weights.transpose();
    const Eigen::MatrixXd projected = reconstructed * model.term_weights;
    CHECK((projected - model.doc_coords).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("default rank follows min(100, min(N, M) - 1)") {
    CHECK(default_rank(158, 100000) == 100);
    CHECK(default_rank(20, 500) == 19);
    CHECK(default_rank(2, 2) == 1);
    CHECK(default_rank(1, 1) == 1);
}

TEST_CASE("component_terms separates an engineered two-topic corpus") {
    // Two mirrored topic blocks glued together by a pair of shared grams;
    // one of the leading components must contrast the topics by sign.
    std::vector<NGramStream> streams;
    for (int d = 0; d < 10; ++d) {
        NGramStream s{"doc" + std::to_string(d), {}};
        for (int g = 0; g < 6; ++g) {
            s.grams.push_back((d < 5 ? "x" : "y") +
                              std::to_string((d % 5 + g) % 8));
        }
        s.grams.push_back("s0");
        s.grams.push_back("s1");
        streams.push_back(std::move(s));
    }
    const TfIdfMatrix matrix = fit_transform(streams);
    const LsaModel model = truncated_svd(matrix, 4, 42);

    // Find a component whose strong terms partition by topic sign: all
    // heavy x-grams on one side, all heavy y-grams on the other.
    bool found = false;
    for (int component = 0; component < 4 && !found; ++component) {
        const ComponentTerms terms =
            component_terms(model, component, matrix.n_grams());
        double max_abs = 0.0;
        for (const auto& [gram, weight] : terms.positive) {
            max_abs = std::max(max_abs, std::abs(weight));
        }
        for (const auto& [gram, weight] : terms.negative) {
            max_abs = std::max(max_abs, std::abs(weight));
        }
        std::size_t x_positive = 0, y_positive = 0, x_negative = 0,
                    y_negative = 0;
        auto tally = [&](const WeightedGram& entry) {
            if (entry.gram[0] != 'x' && entry.gram[0] != 'y') return;
            if (std::abs(entry.weight) < 0.2 * max_abs) return;
            if (entry.weight > 0.0) {
                (entry.gram[0] == 'x' ? x_positive : y_positive) += 1;
            } else {
                (entry.gram[0] == 'x' ? x_negative : y_negative) += 1;
            }
        };
        for (const auto& entry : terms.positive) tally(entry);
        for (const auto& entry : terms.negative) tally(entry);
        const bool x_then_y = x_positive > 0 && y_negative > 0 &&
                              y_positive == 0 && x_negative == 0;
        const bool y_then_x = y_positive > 0 && x_negative > 0 &&
                              x_positive == 0 && y_negative == 0;
        found = x_then_y || y_then_x;
    }
    CHECK(found);
}

TEST_CASE("component_terms clamps and validates") {
    const TfIdfMatrix matrix = small_tfidf();
    const LsaModel model = truncated_svd(matrix, 3, 42);

    const ComponentTerms none = component_terms(model, 0, 0);
    CHECK(none.positive.empty());
    CHECK(none.negative.empty());

    const ComponentTerms everything =
        component_terms(model, 1, matrix.n_grams() + 50);
    CHECK(everything.positive.size() == matrix.n_grams());
    CHECK(everything.negative.size() == matrix.n_grams());
    for (std::size_t i = 1; i < everything.positive.size(); ++i) {
        CHECK(everything.positive[i - 1].weight >=
              everything.positive[i].weight);
        CHECK(everything.negative[i - 1].weight <=
              everything.negative[i].weight);
    }

    CHECK_THROWS_AS(component_terms(model, 3, 5), ValidationError);
    CHECK_THROWS_AS(component_terms(model, -1, 5), ValidationError);
}

TEST_CASE("project emits per-document scatter points") {
    SynthConfig config;
    config.n_topics = 2;
    config.n_adversaries = 6;
    config.n_targets = 8;
    config.vocab_per_topic = 30;
    config.shared_vocab = 15;
    config.doc_length = 30;
    config.targeting_strength = 1.0;
    config.emails_per_adversary = 2;
    const CampaignManifest manifest = generate(config);
    const TfIdfMatrix matrix =
        fit_transform(ngram_streams(manifest, 1, StopWordSet{}));
    const LsaModel model = truncated_svd(matrix, 4, 42);

    const auto diag = project(model, manifest, 2, 2);
    for (const auto& point : diag) CHECK(point.x == point.y);

    const auto points = project(model, manifest, 0, 1);
    REQUIRE(points.size() == manifest.documents.size());
    CHECK(points[0].role == Role::Adversary);
    CHECK(points.back().role == Role::Target);

    CHECK_THROWS_AS(project(model, manifest, 0, 9), ValidationError);
}

TEST_CASE("an all-zero document projects to the origin") {
    std::vector<NGramStream> streams = {{"d0", {"aa", "bb"}},
                                        {"d1", {"aa", "cc"}},
                                        {"d2", {}}};
    const TfIdfMatrix matrix = fit_transform(streams);
    const LsaModel model = truncated_svd(matrix, 2, 42);
    CampaignManifest manifest;
    manifest.documents = {Document{"d0", Role::Adversary, "", {}},
                          Document{"d1", Role::Target, "", {}},
                          Document{"d2", Role::Target, "", {}}};
    const auto points = project(model, manifest, 0, 1);
    CHECK(points[2].x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(points[2].y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("group stats: the whole population is never offset from itself") {
    // One target attacked by every adversary.
    SynthConfig config;
    config.n_topics = 2;
    config.n_adversaries = 10;
    config.n_targets = 4;
    config.vocab_per_topic = 30;
    config.shared_vocab = 15;
    config.doc_length = 30;
    config.targeting_strength = 0.0;
    config.emails_per_adversary = 1;
    CampaignManifest manifest = generate(config);
    manifest.edges.clear();
    for (int i = 0; i < config.n_adversaries; ++i) {
        manifest.edges.push_back(
            Edge{manifest.documents[static_cast<std::size_t>(i)].id, "T0", 1});
    }
    validate_manifest(manifest);
    const TfIdfMatrix matrix =
        fit_transform(ngram_streams(manifest, 1, StopWordSet{}));
    const LsaModel model = truncated_svd(matrix, 3, 42);

    const auto stats = group_cluster_stats(model, manifest, 1,
                                           GroupMode::PhishersOfTarget, 12);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].group_label == "T0");
    CHECK(stats[0].degree == 10);
    CHECK(stats[0].group_median == stats[0].population_median);
    CHECK_FALSE(stats[0].offset_significant);
}

TEST_CASE("group stats: size-1 groups fall back to the population error") {
    const TfIdfMatrix matrix = small_tfidf();
    SynthConfig config;  // matching manifest for small_tfidf
    config.n_topics = 2;
    config.n_adversaries = 8;
    config.n_targets = 12;
    config.vocab_per_topic = 40;
    config.shared_vocab = 20;
    config.doc_length = 40;
    config.targeting_strength = 1.0;
    config.emails_per_adversary = 2;
    CampaignManifest manifest = generate(config);
    manifest.edges = {Edge{"A0", "T00", 1}, Edge{"A1", "T00", 1},
                      Edge{"A1", "T01", 1}};
    validate_manifest(manifest);
    const LsaModel model = truncated_svd(matrix, 3, 42);

    const auto stats = group_cluster_stats(model, manifest, 0,
                                           GroupMode::PhishersOfTarget, 12);
    REQUIRE(stats.size() == 2);
    // T00 first (degree 2), then T01 (degree 1, no group sem).
    CHECK(stats[0].group_label == "T00");
    CHECK(stats[0].group_sem.has_value());
    CHECK(stats[1].group_label == "T01");
    CHECK_FALSE(stats[1].group_sem.has_value());
    const double delta =
        std::abs(stats[1].group_median - stats[1].population_median);
    CHECK(stats[1].offset_significant ==
          (delta > *stats[1].population_sem));
}

TEST_CASE("group stats ordering and validation") {
    const TfIdfMatrix matrix = small_tfidf();
    SynthConfig config;
    config.n_topics = 2;
    config.n_adversaries = 8;
    config.n_targets = 12;
    config.vocab_per_topic = 40;
    config.shared_vocab = 20;
    config.doc_length = 40;
    config.targeting_strength = 1.0;
    config.emails_per_adversary = 2;
    CampaignManifest manifest = generate(config);
    manifest.edges = {Edge{"A0", "T02", 1}, Edge{"A1", "T02", 1},
                      Edge{"A2", "T02", 1}, Edge{"A0", "T01", 1},
                      Edge{"A1", "T01", 1}, Edge{"A0", "T05", 1},
                      Edge{"A2", "T04", 1}};
    validate_manifest(manifest);
    const LsaModel model = truncated_svd(matrix, 3, 42);

    const auto stats = group_cluster_stats(model, manifest, 0,
                                           GroupMode::PhishersOfTarget, 3);
    REQUIRE(stats.size() == 3);
    CHECK(stats[0].group_label == "T02");  // degree 3
    CHECK(stats[1].group_label == "T01");  // degree 2
    CHECK(stats[2].group_label == "T04");  // degree 1, tie broken by id
    CHECK(stats[0].component == 0);

    const auto out = group_cluster_stats(model, manifest, 0,
                                         GroupMode::TargetsOfPhisher, 2);
    REQUIRE(out.size() == 2);
    CHECK(out[0].group_label == "A0");  // out-degree 3
    CHECK(out[1].group_label == "A1");

    CHECK_THROWS_AS(group_cluster_stats(model, manifest, 5,
                                        GroupMode::PhishersOfTarget, 3),
                    ValidationError);
    CHECK_THROWS_AS(group_cluster_stats(model, manifest, 0,
                                        GroupMode::PhishersOfTarget, 0),
                    ValidationError);
    manifest.edges.clear();
    CHECK_THROWS_AS(group_cluster_stats(model, manifest, 0,
                                        GroupMode::PhishersOfTarget, 3),
                    ValidationError);
}
