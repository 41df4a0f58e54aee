#include "spearlens/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "spearlens/errors.hpp"

namespace spearlens {

double median_of(std::span<const double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

std::optional<double> sem_of(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return std::nullopt;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double stddev = std::sqrt(ss / static_cast<double>(n - 1));
    return stddev / std::sqrt(static_cast<double>(n));
}

SimilaritySample SimilaritySample::from_values(std::string label,
                                               std::vector<double> values,
                                               std::size_t zero_vector_pairs) {
    SimilaritySample sample;
    sample.label = std::move(label);
    sample.median = median_of(values);
    sample.sem = sem_of(values);
    sample.values = std::move(values);
    sample.zero_vector_pairs = zero_vector_pairs;
    return sample;
}

double cosine(const SparseVector& a, const SparseVector& b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    const double value = dot(a, b) / (na * nb);
    return std::clamp(value, 0.0, 1.0);
}

namespace {

struct RolePartition {
    std::vector<const SparseVector*> adversary_rows;
    std::vector<const SparseVector*> target_rows;
    std::vector<std::size_t> adversary_docs;  // manifest indices
    std::vector<std::size_t> target_docs;
};

RolePartition partition_rows(const TfIdfMatrix& matrix,
                             const CampaignManifest& manifest) {
    RolePartition part;
    for (std::size_t i = 0; i < manifest.documents.size(); ++i) {
        const Document& doc = manifest.documents[i];
        const SparseVector* row = &matrix.row(doc.id);
        if (doc.role == Role::Adversary) {
            part.adversary_rows.push_back(row);
            part.adversary_docs.push_back(i);
        } else {
            part.target_rows.push_back(row);
            part.target_docs.push_back(i);
        }
    }
    return part;
}

}  // namespace

SimilaritySample all_pairs(const TfIdfMatrix& matrix,
                           const CampaignManifest& manifest) {
    const RolePartition part = partition_rows(matrix, manifest);
    if (part.adversary_rows.empty() || part.target_rows.empty()) {
        throw ValidationError(
            "all-pairs similarity requires at least one adversary and one "
            "target document");
    }
    std::vector<double> values;
    values.reserve(part.adversary_rows.size() * part.target_rows.size());
    std::size_t zero_pairs = 0;
    for (const SparseVector* a : part.adversary_rows) {
        for (const SparseVector* t : part.target_rows) {
            if (a->empty() || t->empty()) ++zero_pairs;
            values.push_back(cosine(*a, *t));
        }
    }
    return SimilaritySample::from_values("all-pairs", std::move(values),
                                         zero_pairs);
}

SimilaritySample observed_pairs(const TfIdfMatrix& matrix,
                                const CampaignManifest& manifest,
                                const ObservedOptions& options) {
    if (manifest.edges.empty()) {
        throw ValidationError("no attack edges to build the observed sample");
    }

    // Canonical (adversary index, target index) order over unique edges.
    std::unordered_map<std::string_view, std::size_t> doc_index;
    for (std::size_t i = 0; i < manifest.documents.size(); ++i) {
        doc_index.emplace(manifest.documents[i].id, i);
    }
    std::vector<std::size_t> order(manifest.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        const Edge& el = manifest.edges[l];
        const Edge& er = manifest.edges[r];
        return std::pair(doc_index.at(el.adversary), doc_index.at(el.target)) <
               std::pair(doc_index.at(er.adversary), doc_index.at(er.target));
    });

    std::vector<double> values;
    std::size_t zero_pairs = 0;
    for (std::size_t i : order) {
        const Edge& edge = manifest.edges[i];
        const SparseVector& a = matrix.row(edge.adversary);
        const SparseVector& t = matrix.row(edge.target);
        const std::size_t copies = options.weighted ? edge.count : 1;
        if (a.empty() || t.empty()) zero_pairs += copies;
        const double value = cosine(a, t);
        for (std::size_t c = 0; c < copies; ++c) values.push_back(value);
    }
    return SimilaritySample::from_values("observed", std::move(values),
                                         zero_pairs);
}

double ks_statistic(std::span<const double> s1, std::span<const double> s2) {
    std::vector<double> a(s1.begin(), s1.end());
    std::vector<double> b(s2.begin(), s2.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        const double x = (i < a.size() && (j >= b.size() || a[i] <= b[j]))
                             ? a[i]
                             : b[j];
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n1 -
                                 static_cast<double>(j) / n2));
    }
    return d;
}

namespace {

// Q(lambda) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2), truncated when
// a term drops below 1e-12 or after 100 terms, clamped into (0, 1].
double ks_asymptotic_pvalue(double d, std::size_t n1, std::size_t n2) {
    const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                      (static_cast<double>(n1) + static_cast<double>(n2));
    const double lambda =
        (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    if (lambda < 1e-12) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term =
            std::exp(-2.0 * lambda * lambda * static_cast<double>(j) *
                     static_cast<double>(j));
        sum += sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    return std::clamp(2.0 * sum, 1e-300, 1.0);
}

// Unbiased draw from [0, n). Kept stdlib-free so permutation p-values are
// reproducible across standard library implementations.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

double ks_permutation_pvalue(std::span<const double> s1,
                             std::span<const double> s2, double observed_d,
                             std::uint32_t rounds, std::uint64_t seed) {
    const std::size_t n1 = s1.size();
    const std::size_t n2 = s2.size();
    const double dn1 = static_cast<double>(n1);
    const double dn2 = static_cast<double>(n2);

    // Sort the pool once; a permutation is then just a relabeling scanned in
    // sorted order.
    std::vector<double> pooled;
    pooled.reserve(n1 + n2);
    pooled.insert(pooled.end(), s1.begin(), s1.end());
    pooled.insert(pooled.end(), s2.begin(), s2.end());
    std::sort(pooled.begin(), pooled.end());

    std::vector<std::uint8_t> labels(n1 + n2, 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n1),
              std::uint8_t{1});

    std::mt19937_64 rng(seed);
    std::size_t hits = 0;
    for (std::uint32_t round = 0; round < rounds; ++round) {
        for (std::size_t i = labels.size() - 1; i > 0; --i) {
            std::swap(labels[i], labels[bounded(rng, i + 1)]);
        }
        double d = 0.0;
        std::size_t c1 = 0, c2 = 0, k = 0;
        while (k < pooled.size()) {
            const double x = pooled[k];
            while (k < pooled.size() && pooled[k] == x) {
                if (labels[k]) ++c1; else ++c2;
                ++k;
            }
            d = std::max(d, std::abs(static_cast<double>(c1) / dn1 -
                                     static_cast<double>(c2) / dn2));
        }
        if (d >= observed_d) ++hits;
    }
    return static_cast<double>(1 + hits) / static_cast<double>(rounds + 1);
}

}  // namespace

KsResult ks_two_sample(const SimilaritySample& s1, const SimilaritySample& s2,
                       const KsOptions& options) {
    if (s1.values.empty() || s2.values.empty()) {
        throw ValidationError("KS test requires two nonempty samples");
    }
    KsResult result;
    result.n1 = s1.n();
    result.n2 = s2.n();
    result.method = options.method;
    result.statistic = ks_statistic(s1.values, s2.values);
    if (options.method == KsMethod::Asymptotic) {
        result.p_value =
            ks_asymptotic_pvalue(result.statistic, result.n1, result.n2);
    } else {
        result.p_value = ks_permutation_pvalue(
            s1.values, s2.values, result.statistic,
            options.permutation_rounds, options.seed);
    }
    return result;
}

std::string_view to_string(KsMethod method) {
    return method == KsMethod::Asymptotic ? "asymptotic" : "permutation";
}

double separation_value(double median_obs, double median_all, double sem_obs,
                        double sem_all) {
    return (median_obs - median_all) / (sem_obs + sem_all);
}

SeparationReport separation(const SimilaritySample& observed,
                            const SimilaritySample& all) {
    if (!observed.sem || !all.sem) {
        throw ValidationError(
            "separation requires n >= 2 in both samples (sem undefined)");
    }
    SeparationReport report;
    report.median_obs = observed.median;
    report.median_all = all.median;
    report.sem_obs = *observed.sem;
    report.sem_all = *all.sem;
    report.separation = separation_value(report.median_obs, report.median_all,
                                         report.sem_obs, report.sem_all);
    return report;
}

SingletonStats singleton_stats(const TfIdfMatrix& matrix,
                               const CampaignManifest& manifest) {
    // Degrees over unique edges (the manifest guarantees uniqueness).
    std::unordered_map<std::string_view, std::size_t> in_degree, out_degree;
    for (const Edge& edge : manifest.edges) {
        ++out_degree[edge.adversary];
        ++in_degree[edge.target];
    }

    std::unordered_map<std::string_view, std::size_t> doc_index;
    for (std::size_t i = 0; i < manifest.documents.size(); ++i) {
        doc_index.emplace(manifest.documents[i].id, i);
    }
    std::vector<std::size_t> order(manifest.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        const Edge& el = manifest.edges[l];
        const Edge& er = manifest.edges[r];
        return std::pair(doc_index.at(el.adversary), doc_index.at(el.target)) <
               std::pair(doc_index.at(er.adversary), doc_index.at(er.target));
    });

    std::vector<double> recipient_values, sender_values;
    std::size_t recipient_zero = 0, sender_zero = 0;
    for (std::size_t i : order) {
        const Edge& edge = manifest.edges[i];
        const SparseVector& a = matrix.row(edge.adversary);
        const SparseVector& t = matrix.row(edge.target);
        const bool zero = a.empty() || t.empty();
        const double value = cosine(a, t);
        if (in_degree[edge.target] == 1) {
            recipient_values.push_back(value);
            if (zero) ++recipient_zero;
        }
        if (out_degree[edge.adversary] == 1) {
            sender_values.push_back(value);
            if (zero) ++sender_zero;
        }
    }
    return SingletonStats{
        SimilaritySample::from_values("single-recipient",
                                      std::move(recipient_values),
                                      recipient_zero),
        SimilaritySample::from_values("single-sender",
                                      std::move(sender_values), sender_zero)};
}

std::vector<HistogramBin> histogram(const SimilaritySample& sample,
                                    std::size_t bins) {
    if (bins < 1) throw ValidationError("histogram needs bins >= 1");
    if (sample.values.empty()) {
        throw ValidationError("histogram of an empty sample");
    }
    const auto [min_it, max_it] =
        std::minmax_element(sample.values.begin(), sample.values.end());
    const double lo = *min_it;
    const double hi = *max_it;
    if (lo == hi) {
        return {HistogramBin{lo, hi, sample.values.size()}};
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<HistogramBin> result(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        result[b].low = lo + width * static_cast<double>(b);
        result[b].high = (b + 1 == bins) ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (double v : sample.values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        if (b >= bins) b = bins - 1;
        ++result[b].count;
    }
    return result;
}

std::vector<EcdfPoint> ecdf_points(const SimilaritySample& sample) {
    std::vector<double> sorted(sample.values);
    std::sort(sorted.begin(), sorted.end());
    std::vector<EcdfPoint> points;
    const double n = static_cast<double>(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double x = sorted[i];
        while (i < sorted.size() && sorted[i] == x) ++i;
        points.push_back(EcdfPoint{x, static_cast<double>(i) / n});
    }
    return points;
}

SimilarityStudy similarity_study(const TfIdfMatrix& matrix,
                                 const CampaignManifest& manifest,
                                 const StudyOptions& options) {
    SimilarityStudy study;
    study.all = all_pairs(matrix, manifest);
    study.observed =
        observed_pairs(matrix, manifest, ObservedOptions{options.weighted});
    study.separation = separation(study.observed, study.all);
    study.ks = ks_two_sample(study.observed, study.all, options.ks);
    study.singletons = singleton_stats(matrix, manifest);
    study.all_histogram = histogram(study.all, options.bins);
    study.observed_histogram = histogram(study.observed, options.bins);
    study.all_ecdf = ecdf_points(study.all);
    study.observed_ecdf = ecdf_points(study.observed);
    return study;
}

}  // namespace spearlens
