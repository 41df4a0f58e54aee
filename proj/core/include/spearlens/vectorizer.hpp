#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spearlens/corpus.hpp"
#include "spearlens/sparse.hpp"

namespace spearlens {

struct Vocabulary {
    std::vector<std::string> grams;                        // sorted, unique
    std::unordered_map<std::string, std::uint32_t> index;  // gram -> column

    std::size_t size() const { return grams.size(); }
};

// Boolean-tf, smoothed-idf weights over the joint corpus:
//
//   weight(i, k) = [doc i contains gram k] * (1 + ln((N+1) / (D(k)+1)))
//
// where N is the document count and D(k) the number of documents containing
// gram k. Rows follow the input stream order; no row normalization is stored.
struct TfIdfMatrix {
    Vocabulary vocabulary;
    SparseMatrix matrix;  // one row per document
    std::vector<std::string> doc_ids;
    std::vector<std::uint32_t> doc_freq;  // D(k), per column
    std::vector<double> idf;              // per column
    std::unordered_map<std::string, std::size_t> row_index;

    std::size_t n_docs() const { return matrix.n_rows(); }
    std::size_t n_grams() const { return vocabulary.size(); }

    // Feature vector of one document; throws ValidationError for unknown ids.
    const SparseVector& row(std::string_view doc_id) const;
};

struct FitOptions {
    // Grams appearing in fewer than min_df documents are dropped from the
    // vocabulary. Default keeps everything.
    std::uint32_t min_df = 1;
};

// Builds the shared vocabulary and the sparse weight matrix. Requires at
// least two documents and at least one nonempty gram stream.
TfIdfMatrix fit_transform(std::span<const NGramStream> streams,
                          const FitOptions& options = {});

// CSV exports: (doc_id, gram, weight) triples and the vocabulary listing.
void write_matrix_csv(const TfIdfMatrix& matrix, std::ostream& out);
void write_vocabulary_csv(const TfIdfMatrix& matrix, std::ostream& out);

}  // namespace spearlens
