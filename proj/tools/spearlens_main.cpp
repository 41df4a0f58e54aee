// spearlens: quantifies how targeted a phishing campaign is by comparing
// attacker bait documents against victim profile documents.
//
// Subcommands: synth, ingest, vectorize, similarity, lsa, demographics,
// characterize. Exit codes: 0 success, 2 validation error, 3 numerical
// non-convergence.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spearlens/corpus.hpp"
#include "spearlens/errors.hpp"
#include "spearlens/lsa.hpp"
#include "spearlens/report.hpp"
#include "spearlens/similarity.hpp"
#include "spearlens/synth.hpp"
#include "spearlens/vectorizer.hpp"

namespace {

namespace fs = std::filesystem;
using namespace spearlens;

struct GlobalOptions {
    std::uint64_t seed = 42;
    std::string stop_words_file;
    int ngram_max = 3;
    int k = 0;  // 0 = automatic
    std::string ks_method = "asymptotic";
    std::string out_dir;
};

StopWordSet resolve_stop_words(const GlobalOptions& global) {
    if (global.stop_words_file.empty()) return StopWordSet::builtin_english();
    return StopWordSet::from_file(global.stop_words_file);
}

KsMethod resolve_ks_method(const std::string& name) {
    if (name == "asymptotic") return KsMethod::Asymptotic;
    if (name == "permutation") return KsMethod::Permutation;
    throw ValidationError("unknown --ks-method \"" + name + "\"");
}

// Emits to <out>/<filename> when --out was given, stdout otherwise.
void emit(const GlobalOptions& global, const std::string& filename,
          const std::string& payload) {
    if (global.out_dir.empty()) {
        std::cout << payload << '\n';
        return;
    }
    fs::create_directories(global.out_dir);
    const fs::path path = fs::path(global.out_dir) / filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << payload << '\n';
    std::cerr << "wrote " << path.string() << '\n';
}

CampaignManifest load_and_report(const std::string& manifest_path) {
    std::vector<std::string> warnings;
    CampaignManifest manifest = load_manifest(manifest_path, &warnings);
    for (const std::string& w : warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    return manifest;
}

TfIdfMatrix vectorize(const CampaignManifest& manifest,
                      const GlobalOptions& global, std::uint32_t min_df) {
    const auto streams =
        ngram_streams(manifest, global.ngram_max, resolve_stop_words(global));
    return fit_transform(streams, FitOptions{min_df});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "spearlens: was this phishing campaign targeted or random spam?"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Seed for all randomized steps");
    app.add_option("--stop-words", global.stop_words_file,
                   "Stop-word override file (one term per line, # comments)");
    app.add_option("--ngram-max", global.ngram_max, "Largest n-gram order")
        ->check(CLI::Range(1, 3));
    app.add_option("--k", global.k,
                   "LSA truncation rank (0 = min(100, min(N, M) - 1))");
    app.add_option("--ks-method", global.ks_method,
                   "KS p-value method: asymptotic or permutation")
        ->check(CLI::IsMember({"asymptotic", "permutation"}));
    app.add_option("--out", global.out_dir,
                   "Output directory (default: JSON to stdout)");

    // synth
    auto* synth_cmd = app.add_subcommand(
        "synth", "Generate a synthetic campaign into --out");
    SynthConfig synth_config;
    bool synth_benchmark = false;
    int synth_clustered = 0;
    synth_cmd->add_option("--topics", synth_config.n_topics, "Topic count");
    synth_cmd->add_option("--vocab-per-topic", synth_config.vocab_per_topic,
                          "Vocabulary size per topic");
    synth_cmd->add_option("--shared-vocab", synth_config.shared_vocab,
                          "Shared vocabulary size");
    synth_cmd->add_option("--adversaries", synth_config.n_adversaries,
                          "Adversary document count");
    synth_cmd->add_option("--targets", synth_config.n_targets,
                          "Target document count (per category in benchmark mode)");
    synth_cmd->add_option("--doc-length", synth_config.doc_length,
                          "Tokens per document");
    synth_cmd->add_option("--theta", synth_config.targeting_strength,
                          "Targeting strength in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
    synth_cmd->add_option("--emails-per-adversary",
                          synth_config.emails_per_adversary,
                          "Emails sent by each adversary");
    synth_cmd->add_flag("--benchmark", synth_benchmark,
                        "Three-category labeled corpus without edges");
    synth_cmd->add_option(
        "--clustered", synth_clustered,
        "Engineered per-target attacker clusters of this size");

    // ingest
    auto* ingest_cmd =
        app.add_subcommand("ingest", "Validate a manifest and summarize it");
    std::string manifest_path;
    ingest_cmd->add_option("manifest", manifest_path, "Path to manifest.json")
        ->required();

    // vectorize
    auto* vectorize_cmd = app.add_subcommand(
        "vectorize", "Export the tf-idf matrix and vocabulary as CSV");
    vectorize_cmd->add_option("manifest", manifest_path, "Path to manifest.json")
        ->required();
    std::uint32_t min_df = 1;
    vectorize_cmd->add_option("--min-df", min_df,
                              "Drop grams seen in fewer documents than this");

    // similarity
    auto* similarity_cmd = app.add_subcommand(
        "similarity",
        "All-pairs vs observed-pairs distributions, separation, KS test");
    similarity_cmd->add_option("manifest", manifest_path, "Path to manifest.json")
        ->required();
    bool weighted = false;
    std::size_t bins = 50;
    std::uint32_t permutation_rounds = 10000;
    similarity_cmd->add_flag(
        "--weighted", weighted,
        "Weight each edge by its email count (sensitivity analysis)");
    similarity_cmd->add_option("--bins", bins, "Histogram bin count");
    similarity_cmd->add_option("--permutation-rounds", permutation_rounds,
                               "Re-splits for the permutation p-value");
    similarity_cmd->add_option("--min-df", min_df,
                               "Drop grams seen in fewer documents than this");

    // lsa
    auto* lsa_cmd = app.add_subcommand(
        "lsa", "Truncated SVD: components, coordinates, group statistics");
    lsa_cmd->add_option("manifest", manifest_path, "Path to manifest.json")
        ->required();
    std::vector<int> components{0, 1};
    std::size_t top_terms = 10;
    std::size_t top_groups = 12;
    lsa_cmd->add_option("--components", components,
                        "Two 0-based component indices for scatter/group output")
        ->expected(2);
    lsa_cmd->add_option("--top-terms", top_terms,
                        "Vocabulary entries to list per component sign");
    lsa_cmd->add_option("--top-groups", top_groups,
                        "Highest-degree groups to analyze per mode");
    lsa_cmd->add_option("--min-df", min_df,
                        "Drop grams seen in fewer documents than this");

    // demographics
    auto* demographics_cmd = app.add_subcommand(
        "demographics", "Distribution of received emails over a metadata field");
    demographics_cmd
        ->add_option("manifest", manifest_path, "Path to manifest.json")
        ->required();
    std::string field = "group";
    demographics_cmd->add_option("--field", field, "Target metadata field");

    // characterize
    auto* characterize_cmd = app.add_subcommand(
        "characterize", "Full campaign report: corpus -> tf-idf -> similarity "
                        "-> LSA -> demographics -> verdict");
    characterize_cmd
        ->add_option("manifest", manifest_path, "Path to manifest.json")
        ->required();
    double targeted_p = 0.01;
    double spam_p = 0.1;
    characterize_cmd->add_flag("--weighted", weighted,
                               "Weight each edge by its email count");
    characterize_cmd->add_option("--bins", bins, "Histogram bin count");
    characterize_cmd->add_option("--permutation-rounds", permutation_rounds,
                                 "Re-splits for the permutation p-value");
    characterize_cmd->add_option("--min-df", min_df,
                                 "Drop grams seen in fewer documents than this");
    characterize_cmd->add_option("--field", field, "Demographics metadata field");
    characterize_cmd
        ->add_option("--components", components,
                     "Two 0-based component indices for scatter/group output")
        ->expected(2);
    characterize_cmd->add_option("--top-terms", top_terms,
                                 "Vocabulary entries per component sign");
    characterize_cmd->add_option("--top-groups", top_groups,
                                 "Highest-degree groups per mode");
    characterize_cmd->add_option("--targeted-p", targeted_p,
                                 "Verdict threshold: targeted below this p");
    characterize_cmd->add_option(
        "--spam-p", spam_p,
        "Verdict threshold: consistent with random spam at or above this p");

    // Let global options (--seed, --out, ...) appear after the subcommand.
    for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad arguments are validation errors
    }

    try {
        if (synth_cmd->parsed()) {
            if (global.out_dir.empty()) {
                throw ValidationError("synth requires --out <dir>");
            }
            synth_config.seed = global.seed;
            CampaignManifest manifest;
            if (synth_benchmark) {
                manifest = benchmark_corpus(synth_config);
            } else if (synth_clustered > 0) {
                manifest = clustered_campaign(synth_config, synth_clustered);
            } else {
                manifest = generate(synth_config);
            }
            save_manifest(manifest, global.out_dir);
            std::cerr << "wrote "
                      << (fs::path(global.out_dir) / "manifest.json").string()
                      << " (" << manifest.documents.size() << " documents, "
                      << manifest.edges.size() << " edges)\n";
        } else if (ingest_cmd->parsed()) {
            std::vector<std::string> warnings;
            const CampaignManifest manifest =
                load_manifest(manifest_path, &warnings);
            emit(global, "ingest.json",
                 manifest_summary_json(manifest, warnings));
        } else if (vectorize_cmd->parsed()) {
            const CampaignManifest manifest = load_and_report(manifest_path);
            const TfIdfMatrix matrix = vectorize(manifest, global, min_df);
            if (global.out_dir.empty()) {
                write_matrix_csv(matrix, std::cout);
            } else {
                fs::create_directories(global.out_dir);
                std::ofstream matrix_out(
                    fs::path(global.out_dir) / "matrix.csv", std::ios::binary);
                write_matrix_csv(matrix, matrix_out);
                std::ofstream vocab_out(
                    fs::path(global.out_dir) / "vocabulary.csv",
                    std::ios::binary);
                write_vocabulary_csv(matrix, vocab_out);
                std::cerr << "wrote matrix.csv and vocabulary.csv under "
                          << global.out_dir << '\n';
            }
        } else if (similarity_cmd->parsed()) {
            const CampaignManifest manifest = load_and_report(manifest_path);
            const TfIdfMatrix matrix = vectorize(manifest, global, min_df);
            StudyOptions options;
            options.weighted = weighted;
            options.ks = KsOptions{resolve_ks_method(global.ks_method),
                                   permutation_rounds, global.seed};
            options.bins = bins;
            const SimilarityStudy study =
                similarity_study(matrix, manifest, options);
            emit(global, "similarity.json", similarity_study_json(study));
        } else if (lsa_cmd->parsed()) {
            const CampaignManifest manifest = load_and_report(manifest_path);
            const TfIdfMatrix matrix = vectorize(manifest, global, min_df);
            const int k = global.k > 0
                              ? global.k
                              : default_rank(matrix.n_docs(), matrix.n_grams());
            const LsaModel model = truncated_svd(matrix, k, global.seed);
            emit(global, "lsa.json",
                 lsa_summary_json(model, manifest,
                                  {components[0], components[1]}, top_terms,
                                  top_groups));
        } else if (demographics_cmd->parsed()) {
            const CampaignManifest manifest = load_and_report(manifest_path);
            const auto rows = demographics(manifest, field);
            emit(global, "demographics.json", demographics_json(rows));
        } else if (characterize_cmd->parsed()) {
            const CampaignManifest manifest = load_and_report(manifest_path);
            CharacterizeOptions options;
            options.ngram_max = global.ngram_max;
            options.stop_words = resolve_stop_words(global);
            options.min_df = min_df;
            options.weighted_edges = weighted;
            options.k = global.k;
            options.seed = global.seed;
            options.ks_method = resolve_ks_method(global.ks_method);
            options.permutation_rounds = permutation_rounds;
            options.histogram_bins = bins;
            options.demographics_field = field;
            options.components = {components[0], components[1]};
            options.top_terms = top_terms;
            options.top_groups = top_groups;
            options.targeted_p = targeted_p;
            options.spam_p = spam_p;
            const CampaignReport report = characterize(manifest, options);
            emit(global, "report.json", report_to_json(report));
            std::cerr << "verdict: " << report.verdict.label
                      << " (KS p = " << report.verdict.p_value << ")\n";
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
