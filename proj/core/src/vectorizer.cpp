#include "spearlens/vectorizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "spearlens/errors.hpp"

namespace spearlens {

const SparseVector& TfIdfMatrix::row(std::string_view doc_id) const {
    auto it = row_index.find(std::string(doc_id));
    if (it == row_index.end()) {
        throw ValidationError("unknown document id \"" + std::string(doc_id) +
                              "\"");
    }
    return matrix.rows[it->second];
}

TfIdfMatrix fit_transform(std::span<const NGramStream> streams,
                          const FitOptions& options) {
    if (streams.size() < 2) {
        throw ValidationError(
            "tf-idf requires at least 2 documents (distribution statistics "
            "are undefined otherwise); got " +
            std::to_string(streams.size()));
    }

    // Distinct grams per document, then document frequencies. std::map keeps
    // the vocabulary sorted as it accumulates.
    std::vector<std::set<std::string_view>> per_doc(streams.size());
    std::map<std::string_view, std::uint32_t> df;
    for (std::size_t i = 0; i < streams.size(); ++i) {
        for (const auto& gram : streams[i].grams) {
            per_doc[i].insert(gram);
        }
        for (const auto& gram : per_doc[i]) ++df[gram];
    }
    if (df.empty()) {
        throw ValidationError("all gram streams are empty");
    }

    TfIdfMatrix result;
    const double n_docs = static_cast<double>(streams.size());
    for (const auto& [gram, count] : df) {
        if (count < options.min_df) continue;
        const auto column = static_cast<std::uint32_t>(result.vocabulary.grams.size());
        result.vocabulary.grams.emplace_back(gram);
        result.vocabulary.index.emplace(gram, column);
        result.doc_freq.push_back(count);
        result.idf.push_back(1.0 + std::log((n_docs + 1.0) / (count + 1.0)));
    }
    if (result.vocabulary.grams.empty()) {
        throw ValidationError("min_df=" + std::to_string(options.min_df) +
                              " prunes the entire vocabulary");
    }

    result.matrix.n_cols = result.vocabulary.size();
    result.matrix.rows.resize(streams.size());
    result.doc_ids.reserve(streams.size());
    for (std::size_t i = 0; i < streams.size(); ++i) {
        result.doc_ids.push_back(streams[i].doc_id);
        if (!result.row_index.emplace(streams[i].doc_id, i).second) {
            throw ValidationError("duplicate document id \"" +
                                  streams[i].doc_id + "\" in gram streams");
        }
        SparseVector& row = result.matrix.rows[i];
        row.reserve(per_doc[i].size());
        for (const auto& gram : per_doc[i]) {
            auto it = result.vocabulary.index.find(std::string(gram));
            if (it == result.vocabulary.index.end()) continue;  // pruned
            row.emplace_back(it->second, result.idf[it->second]);
        }
        // per_doc is sorted lexicographically; columns were assigned in the
        // same order, so rows come out sorted by column already.
    }
    return result;
}

namespace {

// Quotes a CSV field only when it needs it.
std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_double(std::ostream& out, double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    out << buffer;
}

}  // namespace

void write_matrix_csv(const TfIdfMatrix& matrix, std::ostream& out) {
    out << "doc_id,gram,weight\n";
    for (std::size_t i = 0; i < matrix.n_docs(); ++i) {
        const std::string id = csv_escape(matrix.doc_ids[i]);
        for (const auto& [column, weight] : matrix.matrix.rows[i]) {
            out << id << ',' << csv_escape(matrix.vocabulary.grams[column])
                << ',';
            write_double(out, weight);
            out << '\n';
        }
    }
}

void write_vocabulary_csv(const TfIdfMatrix& matrix, std::ostream& out) {
    out << "column,gram,doc_freq,idf\n";
    for (std::size_t k = 0; k < matrix.n_grams(); ++k) {
        out << k << ',' << csv_escape(matrix.vocabulary.grams[k]) << ','
            << matrix.doc_freq[k] << ',';
        write_double(out, matrix.idf[k]);
        out << '\n';
    }
}

}  // namespace spearlens
