#include "spearlens/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "spearlens/errors.hpp"

namespace spearlens {

using nlohmann::ordered_json;

std::vector<DemographicsRow> demographics(const CampaignManifest& manifest,
                                          const std::string& field) {
    if (manifest.edges.empty()) {
        throw ValidationError("demographics: manifest has no attack edges");
    }
    std::unordered_map<std::string_view, const Document*> by_id;
    for (const Document& doc : manifest.documents) by_id.emplace(doc.id, &doc);

    struct Bucket {
        std::uint64_t emails = 0;
        std::set<std::string_view> targets;
    };
    std::map<std::string, Bucket> buckets;
    std::uint64_t total = 0;
    for (const Edge& edge : manifest.edges) {
        const Document* target = by_id.at(edge.target);
        auto it = target->metadata.find(field);
        const std::string value =
            it == target->metadata.end() ? "unknown" : it->second;
        Bucket& bucket = buckets[value];
        bucket.emails += edge.count;
        bucket.targets.insert(target->id);
        total += edge.count;
    }

    std::vector<DemographicsRow> rows;
    rows.reserve(buckets.size());
    for (const auto& [value, bucket] : buckets) {
        rows.push_back(DemographicsRow{
            value, bucket.emails, bucket.targets.size(),
            100.0 * static_cast<double>(bucket.emails) /
                static_cast<double>(total)});
    }
    std::sort(rows.begin(), rows.end(),
              [](const DemographicsRow& l, const DemographicsRow& r) {
                  if (l.email_count != r.email_count) {
                      return l.email_count > r.email_count;
                  }
                  return l.value < r.value;
              });
    return rows;
}

std::string_view verdict_label(double p_value, double targeted_p,
                               double spam_p) {
    if (p_value < targeted_p) return "targeted";
    if (p_value < spam_p) return "indeterminate";
    return "consistent with random spam";
}

namespace {

// Rethrows the current stage's error with the stage name attached, keeping
// the error type (and the CLI exit code that hangs off it).
template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(name) + ": " + e.what(),
                               e.residual());
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(name) + ": " + e.what());
    }
}

}  // namespace

CampaignReport characterize(const CampaignManifest& manifest,
                            const CharacterizeOptions& options) {
    stage("corpus", [&] { validate_manifest(manifest); return 0; });
    if (manifest.edges.empty()) {
        throw ValidationError("corpus: manifest has no attack edges");
    }

    CampaignReport report;
    report.config.ngram_max = options.ngram_max;
    report.config.min_df = options.min_df;
    report.config.weighted_edges = options.weighted_edges;
    report.config.seed = options.seed;
    report.config.ks_method = std::string(to_string(options.ks_method));
    report.config.permutation_rounds = options.permutation_rounds;
    report.config.histogram_bins = options.histogram_bins;
    report.config.demographics_field = options.demographics_field;
    report.config.components = options.components;
    report.config.top_terms = options.top_terms;
    report.config.top_groups = options.top_groups;
    report.config.stop_word_count = options.stop_words.size();

    report.n_documents = manifest.documents.size();
    report.n_adversaries = manifest.indices_of(Role::Adversary).size();
    report.n_targets = manifest.indices_of(Role::Target).size();
    report.n_edges = manifest.edges.size();
    for (const Edge& edge : manifest.edges) report.n_emails += edge.count;

    const std::vector<NGramStream> streams = stage("corpus", [&] {
        return ngram_streams(manifest, options.ngram_max, options.stop_words);
    });
    for (const NGramStream& s : streams) {
        if (s.grams.empty()) ++report.n_empty_documents;
    }

    const TfIdfMatrix tfidf = stage("vectorizer", [&] {
        return fit_transform(streams, FitOptions{options.min_df});
    });
    report.vocabulary_size = tfidf.n_grams();
    report.matrix_nonzeros = tfidf.matrix.nnz();

    report.similarity = stage("similarity", [&] {
        StudyOptions study_options;
        study_options.weighted = options.weighted_edges;
        study_options.ks = KsOptions{options.ks_method,
                                     options.permutation_rounds, options.seed};
        study_options.bins = options.histogram_bins;
        return similarity_study(tfidf, manifest, study_options);
    });

    report.lsa = stage("lsa", [&] {
        const int k = options.k > 0
                          ? options.k
                          : default_rank(tfidf.n_docs(), tfidf.n_grams());
        const LsaModel model = truncated_svd(tfidf, k, options.seed);

        LsaSection section;
        section.k = k;
        section.singular_values = model.singular_values;
        section.scatter = project(model, manifest, options.components[0],
                                  options.components[1]);
        for (int component : options.components) {
            ComponentSummary summary;
            summary.component = component;
            summary.terms = component_terms(model, component, options.top_terms);
            summary.phishers_of_target = group_cluster_stats(
                model, manifest, component, GroupMode::PhishersOfTarget,
                options.top_groups);
            summary.targets_of_phisher = group_cluster_stats(
                model, manifest, component, GroupMode::TargetsOfPhisher,
                options.top_groups);
            section.components.push_back(std::move(summary));
        }
        return section;
    });

    report.demographics = stage("report", [&] {
        return demographics(manifest, options.demographics_field);
    });

    report.verdict.p_value = report.similarity.ks.p_value;
    report.verdict.targeted_p = options.targeted_p;
    report.verdict.spam_p = options.spam_p;
    report.verdict.label = std::string(verdict_label(
        report.verdict.p_value, options.targeted_p, options.spam_p));
    report.verdict.separation = report.similarity.separation.separation;
    return report;
}

namespace {

ordered_json json_number_or_null(double value) {
    if (std::isnan(value)) return nullptr;
    return value;
}

ordered_json json_optional(const std::optional<double>& value) {
    if (!value) return nullptr;
    return *value;
}

ordered_json sample_summary_json(const SimilaritySample& sample) {
    return ordered_json{{"label", sample.label},
                        {"n", sample.n()},
                        {"median", json_number_or_null(sample.median)},
                        {"sem", json_optional(sample.sem)},
                        {"zero_vector_pairs", sample.zero_vector_pairs}};
}

ordered_json histogram_json(const std::vector<HistogramBin>& bins) {
    ordered_json out = ordered_json::array();
    for (const HistogramBin& bin : bins) {
        out.push_back(
            ordered_json{{"low", bin.low}, {"high", bin.high}, {"count", bin.count}});
    }
    return out;
}

ordered_json ecdf_json(const std::vector<EcdfPoint>& points) {
    ordered_json out = ordered_json::array();
    for (const EcdfPoint& p : points) {
        out.push_back(ordered_json{{"value", p.value}, {"cum_prob", p.cum_prob}});
    }
    return out;
}

ordered_json ks_json(const KsResult& ks) {
    return ordered_json{{"statistic", ks.statistic},
                        {"p_value", ks.p_value},
                        {"n1", ks.n1},
                        {"n2", ks.n2},
                        {"method", std::string(to_string(ks.method))}};
}

ordered_json separation_json(const SeparationReport& report) {
    return ordered_json{{"median_obs", report.median_obs},
                        {"median_all", report.median_all},
                        {"sem_obs", report.sem_obs},
                        {"sem_all", report.sem_all},
                        {"separation", report.separation}};
}

ordered_json study_json(const SimilarityStudy& study) {
    ordered_json out;
    out["all_pairs"] = sample_summary_json(study.all);
    out["observed_pairs"] = sample_summary_json(study.observed);
    out["separation"] = separation_json(study.separation);
    out["ks"] = ks_json(study.ks);
    out["singletons"] = ordered_json{
        {"single_recipient", sample_summary_json(study.singletons.single_recipient)},
        {"single_sender", sample_summary_json(study.singletons.single_sender)}};
    out["histograms"] = ordered_json{
        {"all_pairs", histogram_json(study.all_histogram)},
        {"observed_pairs", histogram_json(study.observed_histogram)}};
    out["ecdf"] = ordered_json{{"all_pairs", ecdf_json(study.all_ecdf)},
                               {"observed_pairs", ecdf_json(study.observed_ecdf)}};
    return out;
}

ordered_json terms_json(const ComponentTerms& terms) {
    auto list = [](const std::vector<WeightedGram>& grams) {
        ordered_json out = ordered_json::array();
        for (const WeightedGram& g : grams) {
            out.push_back(ordered_json{{"gram", g.gram}, {"weight", g.weight}});
        }
        return out;
    };
    return ordered_json{{"positive", list(terms.positive)},
                        {"negative", list(terms.negative)}};
}

ordered_json group_stats_json(const std::vector<GroupClusterStat>& stats) {
    ordered_json out = ordered_json::array();
    for (const GroupClusterStat& stat : stats) {
        out.push_back(ordered_json{
            {"group", stat.group_label},
            {"component", stat.component},
            {"degree", stat.degree},
            {"group_size", stat.group_size},
            {"group_median", json_number_or_null(stat.group_median)},
            {"group_sem", json_optional(stat.group_sem)},
            {"population_median", stat.population_median},
            {"population_sem", json_optional(stat.population_sem)},
            {"offset_significant", stat.offset_significant}});
    }
    return out;
}

ordered_json scatter_json(const std::vector<ScatterPoint>& points) {
    ordered_json out = ordered_json::array();
    for (const ScatterPoint& p : points) {
        out.push_back(ordered_json{{"doc_id", p.doc_id},
                                   {"role", std::string(to_string(p.role))},
                                   {"x", p.x},
                                   {"y", p.y}});
    }
    return out;
}

ordered_json demographics_rows_json(std::span<const DemographicsRow> rows) {
    ordered_json out = ordered_json::array();
    for (const DemographicsRow& row : rows) {
        out.push_back(ordered_json{{"value", row.value},
                                   {"email_count", row.email_count},
                                   {"unique_targets", row.unique_targets},
                                   {"percent", row.percent}});
    }
    return out;
}

}  // namespace

std::string report_to_json(const CampaignReport& report, int indent) {
    ordered_json out;
    out["config"] = ordered_json{
        {"ngram_max", report.config.ngram_max},
        {"min_df", report.config.min_df},
        {"weighted_edges", report.config.weighted_edges},
        {"k", report.lsa.k},
        {"seed", report.config.seed},
        {"ks_method", report.config.ks_method},
        {"permutation_rounds", report.config.permutation_rounds},
        {"histogram_bins", report.config.histogram_bins},
        {"demographics_field", report.config.demographics_field},
        {"components",
         ordered_json::array(
             {report.config.components[0], report.config.components[1]})},
        {"top_terms", report.config.top_terms},
        {"top_groups", report.config.top_groups},
        {"stop_word_count", report.config.stop_word_count}};
    out["corpus"] = ordered_json{{"documents", report.n_documents},
                                 {"adversaries", report.n_adversaries},
                                 {"targets", report.n_targets},
                                 {"edges", report.n_edges},
                                 {"emails", report.n_emails},
                                 {"empty_documents", report.n_empty_documents}};
    out["vectorizer"] = ordered_json{{"vocabulary_size", report.vocabulary_size},
                                     {"matrix_nonzeros", report.matrix_nonzeros}};
    out["similarity"] = study_json(report.similarity);

    ordered_json lsa;
    lsa["k"] = report.lsa.k;
    lsa["singular_values"] = report.lsa.singular_values;
    lsa["scatter"] = scatter_json(report.lsa.scatter);
    lsa["components"] = ordered_json::array();
    for (const ComponentSummary& summary : report.lsa.components) {
        lsa["components"].push_back(ordered_json{
            {"component", summary.component},
            {"terms", terms_json(summary.terms)},
            {"phishers_of_target", group_stats_json(summary.phishers_of_target)},
            {"targets_of_phisher", group_stats_json(summary.targets_of_phisher)}});
    }
    out["lsa"] = std::move(lsa);
    out["demographics"] = demographics_rows_json(report.demographics);
    out["verdict"] = ordered_json{
        {"label", report.verdict.label},
        {"p_value", report.verdict.p_value},
        {"thresholds", ordered_json{{"targeted_p", report.verdict.targeted_p},
                                    {"spam_p", report.verdict.spam_p}}},
        {"separation", report.verdict.separation},
        {"reference_separations",
         ordered_json{
             {"note", "literature reference values, shipped as context only"},
             {"campaign", report.verdict.reference_campaign_separation},
             {"benchmark", report.verdict.reference_benchmark_separation}}}};
    return out.dump(indent);
}

std::string similarity_study_json(const SimilarityStudy& study, int indent) {
    return study_json(study).dump(indent);
}

std::string demographics_json(std::span<const DemographicsRow> rows,
                              int indent) {
    return demographics_rows_json(rows).dump(indent);
}

std::string lsa_summary_json(const LsaModel& model,
                             const CampaignManifest& manifest,
                             std::array<int, 2> components,
                             std::size_t top_terms, std::size_t top_groups,
                             int indent) {
    ordered_json out;
    out["k"] = model.k;
    out["singular_values"] = model.singular_values;
    out["scatter"] = scatter_json(
        project(model, manifest, components[0], components[1]));
    out["components"] = ordered_json::array();
    const bool has_edges = !manifest.edges.empty();
    for (int component : components) {
        ordered_json entry;
        entry["component"] = component;
        entry["terms"] = terms_json(component_terms(model, component, top_terms));
        if (has_edges) {
            entry["phishers_of_target"] = group_stats_json(group_cluster_stats(
                model, manifest, component, GroupMode::PhishersOfTarget,
                top_groups));
            entry["targets_of_phisher"] = group_stats_json(group_cluster_stats(
                model, manifest, component, GroupMode::TargetsOfPhisher,
                top_groups));
        }
        out["components"].push_back(std::move(entry));
    }
    return out.dump(indent);
}

std::string manifest_summary_json(const CampaignManifest& manifest,
                                  std::span<const std::string> warnings,
                                  int indent) {
    std::uint64_t emails = 0;
    for (const Edge& edge : manifest.edges) emails += edge.count;
    ordered_json out;
    out["documents"] = manifest.documents.size();
    out["adversaries"] = manifest.indices_of(Role::Adversary).size();
    out["targets"] = manifest.indices_of(Role::Target).size();
    out["edges"] = manifest.edges.size();
    out["emails"] = emails;
    out["warnings"] = ordered_json::array();
    for (const std::string& w : warnings) out["warnings"].push_back(w);
    return out.dump(indent);
}

}  // namespace spearlens
