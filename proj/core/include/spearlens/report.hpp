#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spearlens/corpus.hpp"
#include "spearlens/lsa.hpp"
#include "spearlens/similarity.hpp"
#include "spearlens/vectorizer.hpp"

namespace spearlens {

// Distribution of received emails over one target metadata field.
struct DemographicsRow {
    std::string value;
    std::uint64_t email_count = 0;   // edge counts summed
    std::size_t unique_targets = 0;
    double percent = 0.0;            // of all emails
};

// Rows sorted by descending email count, ties by value. Targets missing the
// field are bucketed as "unknown". Throws ValidationError when the manifest
// has no edges.
std::vector<DemographicsRow> demographics(const CampaignManifest& manifest,
                                          const std::string& field);

struct CharacterizeOptions {
    int ngram_max = 3;
    StopWordSet stop_words = StopWordSet::builtin_english();
    std::uint32_t min_df = 1;
    bool weighted_edges = false;

    int k = 0;  // 0 selects default_rank(N, M)
    std::uint64_t seed = 42;

    KsMethod ks_method = KsMethod::Asymptotic;
    std::uint32_t permutation_rounds = 10000;
    std::size_t histogram_bins = 50;

    std::string demographics_field = "group";
    std::array<int, 2> components{0, 1};
    std::size_t top_terms = 10;
    std::size_t top_groups = 12;

    // Verdict thresholds on the KS p-value.
    double targeted_p = 0.01;
    double spam_p = 0.1;
};

// "targeted" below targeted_p, "consistent with random spam" at or above
// spam_p, "indeterminate" between. Pure function of its arguments.
std::string_view verdict_label(double p_value, double targeted_p,
                               double spam_p);

struct ComponentSummary {
    int component = 0;
    ComponentTerms terms;
    std::vector<GroupClusterStat> phishers_of_target;
    std::vector<GroupClusterStat> targets_of_phisher;
};

struct LsaSection {
    int k = 0;
    std::vector<double> singular_values;
    std::vector<ScatterPoint> scatter;  // on the two selected components
    std::vector<ComponentSummary> components;
};

struct VerdictSection {
    std::string label;
    double p_value = 1.0;
    double targeted_p = 0.01;
    double spam_p = 0.1;
    double separation = 0.0;
    // Literature anchor points for the separation metric, shipped purely as
    // context: a reported low-reconnaissance campaign and a same-career
    // benchmark corpus.
    double reference_campaign_separation = 6.75;
    double reference_benchmark_separation = 28.2;
};

struct CampaignReport {
    // Input configuration echoed for reproducibility.
    struct Config {
        int ngram_max = 3;
        std::uint32_t min_df = 1;
        bool weighted_edges = false;
        int k = 0;
        std::uint64_t seed = 42;
        std::string ks_method;
        std::uint32_t permutation_rounds = 10000;
        std::size_t histogram_bins = 50;
        std::string demographics_field;
        std::array<int, 2> components{0, 1};
        std::size_t top_terms = 10;
        std::size_t top_groups = 12;
        std::size_t stop_word_count = 0;
    } config;

    std::size_t n_documents = 0;
    std::size_t n_adversaries = 0;
    std::size_t n_targets = 0;
    std::size_t n_edges = 0;
    std::size_t n_emails = 0;           // edge counts summed
    std::size_t n_empty_documents = 0;  // documents with no grams

    std::size_t vocabulary_size = 0;
    std::size_t matrix_nonzeros = 0;

    SimilarityStudy similarity;
    LsaSection lsa;
    std::vector<DemographicsRow> demographics;
    VerdictSection verdict;
};

// Runs the full pipeline: grams -> tf-idf -> similarity study -> LSA &
// group statistics -> demographics -> verdict. Stage failures propagate as
// the original error type with the stage name prefixed.
CampaignReport characterize(const CampaignManifest& manifest,
                            const CharacterizeOptions& options = {});

// JSON serializers. Output is deterministic for a given input.
std::string report_to_json(const CampaignReport& report, int indent = 2);
std::string similarity_study_json(const SimilarityStudy& study,
                                  int indent = 2);
std::string demographics_json(std::span<const DemographicsRow> rows,
                              int indent = 2);
std::string lsa_summary_json(const LsaModel& model,
                             const CampaignManifest& manifest,
                             std::array<int, 2> components,
                             std::size_t top_terms, std::size_t top_groups,
                             int indent = 2);
std::string manifest_summary_json(const CampaignManifest& manifest,
                                  std::span<const std::string> warnings,
                                  int indent = 2);

}  // namespace spearlens
