#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace spearlens {

enum class Role { Adversary, Target };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);  // throws ValidationError

// One text unit: an attacker bait document or a victim profile.
struct Document {
    std::string id;
    Role role = Role::Target;
    std::string text;
    std::map<std::string, std::string> metadata;
};

// Directed attack edge: `adversary` sent `count` emails to `target`.
// Multiplicity lives in count; (adversary, target) pairs are unique.
struct Edge {
    std::string adversary;
    std::string target;
    std::uint32_t count = 1;
};

struct CampaignManifest {
    std::vector<Document> documents;
    std::vector<Edge> edges;

    const Document* find(std::string_view id) const;
    std::vector<std::size_t> indices_of(Role role) const;
};

// Checks every manifest invariant (unique nonempty ids, edge endpoints exist
// with the correct roles, counts >= 1, no duplicate edges). Throws
// ValidationError naming the first offending record.
void validate_manifest(const CampaignManifest& manifest);

// Reads a manifest JSON file and the document text files it references
// (paths are relative to the manifest's directory). The result is validated.
// Documents with empty text are loaded but reported through `warnings`.
CampaignManifest load_manifest(const std::filesystem::path& manifest_file,
                               std::vector<std::string>* warnings = nullptr);

// Writes <dir>/manifest.json plus one UTF-8 text file per document.
void save_manifest(const CampaignManifest& manifest,
                   const std::filesystem::path& dir);

class StopWordSet {
public:
    StopWordSet() = default;
    explicit StopWordSet(std::vector<std::string> words);

    // The fixed list shipped with the library (380-ish common English terms;
    // see stopwords.cpp for the exact contents).
    static StopWordSet builtin_english();

    // One term per line, '#' starts a comment, blank lines ignored.
    static StopWordSet from_file(const std::filesystem::path& path);

    bool contains(std::string_view token) const;
    std::size_t size() const { return words_.size(); }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::unordered_set<std::string, Hash, std::equal_to<>> words_;
};

// Lowercases `text` and splits it into maximal alphanumeric runs, dropping
// runs shorter than two characters. ASCII is classified exactly; non-ASCII
// code points count as letters except the Latin-1 and general punctuation
// blocks. Lengths are measured in code points.
std::vector<std::string> tokenize(std::string_view text);

// Stop-word-filtered n-gram stream for one document. Grams are space-joined
// runs of 1..n_max surviving tokens, unigrams first, then bigrams, trigrams.
struct NGramStream {
    std::string doc_id;
    std::vector<std::string> grams;
};

NGramStream extract_ngrams(std::string doc_id,
                           std::span<const std::string> tokens, int n_max,
                           const StopWordSet& stop_words);

// Tokenizes every document of the manifest and extracts its grams, in
// manifest order.
std::vector<NGramStream> ngram_streams(const CampaignManifest& manifest,
                                       int n_max,
                                       const StopWordSet& stop_words);

}  // namespace spearlens
