#include "spearlens/lsa.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "spearlens/errors.hpp"
#include "spearlens/similarity.hpp"

namespace spearlens {

int default_rank(std::size_t n_docs, std::size_t n_grams) {
    const auto min_dim = static_cast<long>(std::min(n_docs, n_grams));
    return static_cast<int>(std::clamp(std::min(100L, min_dim - 1), 1L, min_dim));
}

LsaModel truncated_svd(const TfIdfMatrix& matrix, const SvdOptions& options) {
    SvdResult svd = truncated_svd(matrix.matrix, options);

    LsaModel model;
    model.k = options.k;
    model.singular_values.assign(svd.singular_values.begin(),
                                 svd.singular_values.end());
    model.doc_coords = svd.u * svd.singular_values.asDiagonal();
    model.term_weights = std::move(svd.v);
    model.doc_ids = matrix.doc_ids;
    model.vocabulary = matrix.vocabulary;
    return model;
}

LsaModel truncated_svd(const TfIdfMatrix& matrix, int k, std::uint64_t seed) {
    SvdOptions options;
    options.k = k;
    options.seed = seed;
    return truncated_svd(matrix, options);
}

ComponentTerms component_terms(const LsaModel& model, int component,
                               std::size_t top_n) {
    if (component < 0 || component >= model.k) {
        throw ValidationError("component " + std::to_string(component) +
                              " out of range [0, " + std::to_string(model.k) +
                              ")");
    }
    const auto m = static_cast<std::size_t>(model.term_weights.rows());
    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t l, std::uint32_t r) {
        const double wl = model.term_weights(l, component);
        const double wr = model.term_weights(r, component);
        if (wl != wr) return wl > wr;
        return l < r;
    });

    const std::size_t n = std::min(top_n, m);
    ComponentTerms terms;
    terms.positive.reserve(n);
    terms.negative.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t col = order[i];
        terms.positive.push_back(WeightedGram{
            model.vocabulary.grams[col], model.term_weights(col, component)});
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t col = order[m - 1 - i];
        terms.negative.push_back(WeightedGram{
            model.vocabulary.grams[col], model.term_weights(col, component)});
    }
    return terms;
}

std::vector<ScatterPoint> project(const LsaModel& model,
                                  const CampaignManifest& manifest,
                                  int component_x, int component_y) {
    for (int c : {component_x, component_y}) {
        if (c < 0 || c >= model.k) {
            throw ValidationError("component " + std::to_string(c) +
                                  " out of range [0, " +
                                  std::to_string(model.k) + ")");
        }
    }
    std::vector<ScatterPoint> points;
    points.reserve(model.doc_ids.size());
    for (std::size_t i = 0; i < model.doc_ids.size(); ++i) {
        const Document* doc = manifest.find(model.doc_ids[i]);
        if (doc == nullptr) {
            throw ValidationError("model document \"" + model.doc_ids[i] +
                                  "\" not present in manifest");
        }
        points.push_back(ScatterPoint{
            doc->id, doc->role,
            model.doc_coords(static_cast<Eigen::Index>(i), component_x),
            model.doc_coords(static_cast<Eigen::Index>(i), component_y)});
    }
    return points;
}

std::vector<GroupClusterStat> group_cluster_stats(
    const LsaModel& model, const CampaignManifest& manifest, int component,
    GroupMode mode, std::size_t top_g) {
    if (component < 0 || component >= model.k) {
        throw ValidationError("component " + std::to_string(component) +
                              " out of range [0, " + std::to_string(model.k) +
                              ")");
    }
    if (top_g < 1) throw ValidationError("top_g must be >= 1");

    std::unordered_map<std::string_view, std::size_t> row_of;
    for (std::size_t i = 0; i < model.doc_ids.size(); ++i) {
        row_of.emplace(model.doc_ids[i], i);
    }
    auto coord = [&](std::string_view id) {
        auto it = row_of.find(id);
        if (it == row_of.end()) {
            throw ValidationError("document \"" + std::string(id) +
                                  "\" has no LSA coordinates");
        }
        return model.doc_coords(static_cast<Eigen::Index>(it->second),
                                component);
    };

    // Neighbor lists keyed by the shared endpoint, in manifest edge order.
    std::map<std::string_view, std::vector<std::string_view>> groups;
    for (const Edge& edge : manifest.edges) {
        if (mode == GroupMode::PhishersOfTarget) {
            groups[edge.target].push_back(edge.adversary);
        } else {
            groups[edge.adversary].push_back(edge.target);
        }
    }
    if (groups.empty()) {
        throw ValidationError("no edges for the requested group mode");
    }

    const Role population_role = mode == GroupMode::PhishersOfTarget
                                     ? Role::Adversary
                                     : Role::Target;
    std::vector<double> population;
    for (const Document& doc : manifest.documents) {
        if (doc.role == population_role) population.push_back(coord(doc.id));
    }
    if (population.empty()) {
        throw ValidationError("population for the requested group mode is empty");
    }
    const double population_median = median_of(population);
    const std::optional<double> population_sem = sem_of(population);

    // Decreasing degree, ties by id. groups is already id-sorted.
    std::vector<std::pair<std::string_view, const std::vector<std::string_view>*>>
        ranked;
    ranked.reserve(groups.size());
    for (const auto& [id, neighbors] : groups) ranked.emplace_back(id, &neighbors);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& l, const auto& r) {
                         return l.second->size() > r.second->size();
                     });
    if (ranked.size() > top_g) ranked.resize(top_g);

    std::vector<GroupClusterStat> stats;
    stats.reserve(ranked.size());
    for (const auto& [id, neighbors] : ranked) {
        std::vector<double> values;
        values.reserve(neighbors->size());
        for (std::string_view n : *neighbors) values.push_back(coord(n));

        GroupClusterStat stat;
        stat.group_label = std::string(id);
        stat.component = component;
        stat.degree = neighbors->size();
        stat.group_size = values.size();
        stat.group_median = median_of(values);
        stat.group_sem = sem_of(values);
        stat.population_median = population_median;
        stat.population_sem = population_sem;

        // Size-1 groups have no sem; the offset test degrades to the
        // population error alone.
        const double threshold = stat.group_sem.value_or(0.0) +
                                 population_sem.value_or(0.0);
        stat.offset_significant =
            std::abs(stat.group_median - population_median) > threshold;
        stats.push_back(std::move(stat));
    }
    return stats;
}

}  // namespace spearlens
