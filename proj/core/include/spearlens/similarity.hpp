#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spearlens/corpus.hpp"
#include "spearlens/sparse.hpp"
#include "spearlens/vectorizer.hpp"

namespace spearlens {

// A labeled sample of cosine similarities with its summary statistics.
// median is NaN for an empty sample; sem needs n >= 2.
struct SimilaritySample {
    std::string label;
    std::vector<double> values;
    double median = 0.0;
    std::optional<double> sem;  // sample standard deviation / sqrt(n)
    std::size_t zero_vector_pairs = 0;  // pairs involving an empty vector

    std::size_t n() const { return values.size(); }

    static SimilaritySample from_values(std::string label,
                                        std::vector<double> values,
                                        std::size_t zero_vector_pairs = 0);
};

double median_of(std::span<const double> values);              // NaN if empty
std::optional<double> sem_of(std::span<const double> values);  // needs n >= 2

// Cosine of the angle between two nonnegative feature vectors, in [0, 1].
// An all-zero vector compares as 0 to everything; callers that need the
// diagnostic count pairs with norm() == 0 themselves.
double cosine(const SparseVector& a, const SparseVector& b);

// One similarity per (adversary, target) cross pair, adversary-major order.
SimilaritySample all_pairs(const TfIdfMatrix& matrix,
                           const CampaignManifest& manifest);

struct ObservedOptions {
    // When set, each edge contributes `count` copies of its similarity.
    // Default treats repeated emails to the same pair as one observation.
    bool weighted = false;
};

// One similarity per unique attack edge, in (adversary, target) index order.
SimilaritySample observed_pairs(const TfIdfMatrix& matrix,
                                const CampaignManifest& manifest,
                                const ObservedOptions& options = {});

enum class KsMethod { Asymptotic, Permutation };

std::string_view to_string(KsMethod method);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    KsMethod method = KsMethod::Asymptotic;
};

struct KsOptions {
    KsMethod method = KsMethod::Asymptotic;
    std::uint32_t permutation_rounds = 10000;
    std::uint64_t seed = 42;
};

// Exact supremum ECDF gap over the merged sample points.
double ks_statistic(std::span<const double> s1, std::span<const double> s2);

KsResult ks_two_sample(const SimilaritySample& s1, const SimilaritySample& s2,
                       const KsOptions& options = {});

// (median_obs - median_all) / (sem_obs + sem_all): how many standard errors
// separate the observed pairings from the random-spam baseline.
struct SeparationReport {
    double median_obs = 0.0;
    double median_all = 0.0;
    double sem_obs = 0.0;
    double sem_all = 0.0;
    double separation = 0.0;
};

double separation_value(double median_obs, double median_all, double sem_obs,
                        double sem_all);

SeparationReport separation(const SimilaritySample& observed,
                            const SimilaritySample& all);

// Edge similarities restricted to degree-1 endpoints (degrees over unique
// edges): recipients attacked exactly once, and senders attacking exactly
// once. Either sample may be empty.
struct SingletonStats {
    SimilaritySample single_recipient;
    SimilaritySample single_sender;
};

SingletonStats singleton_stats(const TfIdfMatrix& matrix,
                               const CampaignManifest& manifest);

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    std::size_t count = 0;
};

// Equal-width bins over [min, max]; a constant sample yields one bin.
std::vector<HistogramBin> histogram(const SimilaritySample& sample,
                                    std::size_t bins);

struct EcdfPoint {
    double value = 0.0;
    double cum_prob = 0.0;
};

std::vector<EcdfPoint> ecdf_points(const SimilaritySample& sample);

// Everything the distribution comparison produces, bundled for reporting.
struct SimilarityStudy {
    SimilaritySample all;
    SimilaritySample observed;
    SeparationReport separation;
    KsResult ks;
    SingletonStats singletons;
    std::vector<HistogramBin> all_histogram;
    std::vector<HistogramBin> observed_histogram;
    std::vector<EcdfPoint> all_ecdf;
    std::vector<EcdfPoint> observed_ecdf;
};

struct StudyOptions {
    bool weighted = false;
    KsOptions ks{};
    std::size_t bins = 50;
};

SimilarityStudy similarity_study(const TfIdfMatrix& matrix,
                                 const CampaignManifest& manifest,
                                 const StudyOptions& options = {});

}  // namespace spearlens
