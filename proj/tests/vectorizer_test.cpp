#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "spearlens/errors.hpp"
#include "spearlens/vectorizer.hpp"

using namespace spearlens;

namespace {

std::vector<NGramStream> three_doc_corpus() {
    return {{"doc1", {"a", "b"}}, {"doc2", {"a"}}, {"doc3", {"a", "c"}}};
}

double weight_of(const TfIdfMatrix& matrix, std::string_view doc_id,
                 const std::string& gram) {
    const SparseVector& row = matrix.row(doc_id);
    const auto column = matrix.vocabulary.index.at(gram);
    for (const auto& [col, weight] : row) {
        if (col == column) return weight;
    }
    return 0.0;
}

}  // namespace

TEST_CASE("three-document worked example") {
    const auto streams = three_doc_corpus();
    const TfIdfMatrix matrix = fit_transform(streams);

    CHECK(matrix.n_docs() == 3);
    CHECK(matrix.n_grams() == 3);
    CHECK(matrix.doc_freq[matrix.vocabulary.index.at("a")] == 3);
    CHECK(matrix.doc_freq[matrix.vocabulary.index.at("b")] == 1);
    CHECK(matrix.doc_freq[matrix.vocabulary.index.at("c")] == 1);

    // Frozen from the independent recomputation: 1 + ln(4/2).
    const double rare_weight = 1.6931471805599453;
    for (const char* doc : {"doc1", "doc2", "doc3"}) {
        CHECK(weight_of(matrix, doc, "a") == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(weight_of(matrix, "doc1", "b") ==
          doctest::Approx(rare_weight).epsilon(1e-15));
    CHECK(weight_of(matrix, "doc3", "c") ==
          doctest::Approx(rare_weight).epsilon(1e-15));
    CHECK(std::abs(weight_of(matrix, "doc1", "b") -
                   oracles::naive_tfidf_weight(true, 3, 1)) < 1e-12);
}

TEST_CASE("a gram present in every document weighs exactly 1.0") {
    const auto streams = three_doc_corpus();
    const TfIdfMatrix matrix = fit_transform(streams);
    for (const char* doc : {"doc1", "doc2", "doc3"}) {
        CHECK(weight_of(matrix, doc, "a") == 1.0);
    }
}

TEST_CASE("absent grams have no stored entry") {
    const auto streams = three_doc_corpus();
    const TfIdfMatrix matrix = fit_transform(streams);
    CHECK(matrix.row("doc2").size() == 1);  // only "a"
    CHECK(matrix.row("doc1").size() == 2);
    const auto b_column = matrix.vocabulary.index.at("b");
    for (const auto& [col, weight] : matrix.row("doc2")) {
        CHECK(col != b_column);
    }
}

TEST_CASE("row lookup is idempotent and rejects unknown ids") {
    const auto streams = three_doc_corpus();
    const TfIdfMatrix matrix = fit_transform(streams);
    CHECK(matrix.row("doc1") == matrix.row("doc1"));
    CHECK_THROWS_AS(matrix.row("doc9"), ValidationError);
}

TEST_CASE("documents with no grams get empty rows") {
    const std::vector<NGramStream> streams = {{"doc1", {"a"}}, {"doc2", {}}};
    const TfIdfMatrix matrix = fit_transform(streams);
    CHECK(matrix.row("doc2").empty());
}

TEST_CASE("fit_transform preconditions") {
    CHECK_THROWS_AS(fit_transform(std::vector<NGramStream>{{"only", {"a"}}}),
                    ValidationError);
    CHECK_THROWS_AS(
        fit_transform(std::vector<NGramStream>{{"d1", {}}, {"d2", {}}}),
        ValidationError);
}

TEST_CASE("vocabulary is sorted and indexes bijectively") {
    const std::vector<NGramStream> streams = {{"d1", {"zeta", "alpha"}},
                                              {"d2", {"mid", "alpha"}}};
    const TfIdfMatrix matrix = fit_transform(streams);
    CHECK(std::is_sorted(matrix.vocabulary.grams.begin(),
                         matrix.vocabulary.grams.end()));
    std::set<std::uint32_t> columns;
    for (const auto& gram : matrix.vocabulary.grams) {
        columns.insert(matrix.vocabulary.index.at(gram));
    }
    CHECK(columns.size() == matrix.n_grams());
    CHECK(*columns.rbegin() == matrix.n_grams() - 1);
}

TEST_CASE("every stored weight matches the naive recomputation") {
    std::mt19937_64 rng(21);
    for (int corpus = 0; corpus < 100; ++corpus) {
        const auto streams =
            oracles::random_streams(rng, 2 + rng() % 9, 50, 30);
        bool any = false;
        for (const auto& s : streams) any = any || !s.grams.empty();
        if (!any) continue;

        const TfIdfMatrix matrix = fit_transform(streams);
        for (std::size_t i = 0; i < streams.size(); ++i) {
            // Stored entries match the oracle...
            for (const auto& [col, weight] : matrix.matrix.rows[i]) {
                const double expected = oracles::naive_tfidf_weight(
                    true, streams.size(), matrix.doc_freq[col]);
                CHECK(std::abs(weight - expected) < 1e-12);
                CHECK(weight > 0.0);
            }
            // ...and exactly the distinct grams of the document are stored.
            const std::set<std::string> distinct(streams[i].grams.begin(),
                                                 streams[i].grams.end());
            CHECK(matrix.matrix.rows[i].size() == distinct.size());
        }
    }
}

TEST_CASE("idf strictly decreases with document frequency") {
    std::mt19937_64 rng(22);
    const auto streams = oracles::random_streams(rng, 8, 30, 25);
    const TfIdfMatrix matrix = fit_transform(streams);
    for (std::size_t k1 = 0; k1 < matrix.n_grams(); ++k1) {
        for (std::size_t k2 = 0; k2 < matrix.n_grams(); ++k2) {
            if (matrix.doc_freq[k1] < matrix.doc_freq[k2]) {
                CHECK(matrix.idf[k1] > matrix.idf[k2]);
            }
        }
    }
}

TEST_CASE("permuting document order permutes rows and keeps the vocabulary") {
    std::mt19937_64 rng(23);
    auto streams = oracles::random_streams(rng, 6, 25, 20);
    streams[0].grams.push_back("anchor");  // ensure nonempty
    const TfIdfMatrix original = fit_transform(streams);

    auto shuffled = streams;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const TfIdfMatrix permuted = fit_transform(shuffled);

    CHECK(permuted.vocabulary.grams == original.vocabulary.grams);
    CHECK(permuted.doc_freq == original.doc_freq);
    CHECK(permuted.idf == original.idf);
    for (const auto& stream : streams) {
        CHECK(permuted.row(stream.doc_id) == original.row(stream.doc_id));
    }
}

TEST_CASE("min_df prunes rare grams") {
    const std::vector<NGramStream> streams = {{"d1", {"common", "rare"}},
                                              {"d2", {"common"}},
                                              {"d3", {"common"}}};
    const TfIdfMatrix pruned = fit_transform(streams, FitOptions{2});
    CHECK(pruned.n_grams() == 1);
    CHECK(pruned.vocabulary.grams[0] == "common");
    CHECK(pruned.row("d1").size() == 1);

    CHECK_THROWS_AS(fit_transform(streams, FitOptions{10}), ValidationError);
}

TEST_CASE("csv exports") {
    const auto streams = three_doc_corpus();
    const TfIdfMatrix matrix = fit_transform(streams);

    std::ostringstream matrix_csv;
    write_matrix_csv(matrix, matrix_csv);
    std::ostringstream vocab_csv;
    write_vocabulary_csv(matrix, vocab_csv);

    const std::string m = matrix_csv.str();
    CHECK(m.starts_with("doc_id,gram,weight\n"));
    // 2 + 1 + 2 stored entries plus the header.
    CHECK(std::count(m.begin(), m.end(), '\n') == 6);
    CHECK(m.find("doc1,a,1\n") != std::string::npos);
    CHECK(m.find("doc1,b,1.6931471805599454") != std::string::npos);

    const std::string v = vocab_csv.str();
    CHECK(v.starts_with("column,gram,doc_freq,idf\n"));
    CHECK(v.find("0,a,3,1\n") != std::string::npos);
}
