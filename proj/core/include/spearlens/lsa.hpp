#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spearlens/corpus.hpp"
#include "spearlens/svd.hpp"
#include "spearlens/vectorizer.hpp"

namespace spearlens {

// Latent Semantic Analysis: rank-k factorization of the tf-idf matrix.
// Documents are placed at U*Sigma coordinates; term weights are the columns
// of V. Component indices are 0-based everywhere.
struct LsaModel {
    int k = 0;
    std::vector<double> singular_values;  // nonincreasing
    Eigen::MatrixXd doc_coords;           // N x k
    Eigen::MatrixXd term_weights;         // M x k
    std::vector<std::string> doc_ids;
    Vocabulary vocabulary;
};

// min(100, min(N, M) - 1), at least 1.
int default_rank(std::size_t n_docs, std::size_t n_grams);

LsaModel truncated_svd(const TfIdfMatrix& matrix, int k, std::uint64_t seed);
LsaModel truncated_svd(const TfIdfMatrix& matrix, const SvdOptions& options);

struct WeightedGram {
    std::string gram;
    double weight = 0.0;
};

// The vocabulary entries a component weights most strongly, both signs.
// positive is sorted most-positive first, negative most-negative first;
// top_n is clamped to the vocabulary size.
struct ComponentTerms {
    std::vector<WeightedGram> positive;
    std::vector<WeightedGram> negative;
};

ComponentTerms component_terms(const LsaModel& model, int component,
                               std::size_t top_n);

// Scatter data: each document's coordinates on a pair of components.
struct ScatterPoint {
    std::string doc_id;
    Role role = Role::Target;
    double x = 0.0;
    double y = 0.0;
};

std::vector<ScatterPoint> project(const LsaModel& model,
                                  const CampaignManifest& manifest,
                                  int component_x, int component_y);

// PhishersOfTarget: for each high in-degree target, the adversaries that
// attacked it, compared against the full adversary population.
// TargetsOfPhisher: for each high out-degree adversary, the targets it
// attacked, compared against the full target population.
enum class GroupMode { PhishersOfTarget, TargetsOfPhisher };

struct GroupClusterStat {
    std::string group_label;  // id of the shared endpoint
    int component = 0;
    std::size_t degree = 0;  // unique-edge degree of the shared endpoint
    std::size_t group_size = 0;
    double group_median = 0.0;
    std::optional<double> group_sem;  // absent for size-1 groups
    double population_median = 0.0;
    std::optional<double> population_sem;
    bool offset_significant = false;
};

// Cluster statistics for the top_g highest-degree nodes of the chosen mode,
// ordered by decreasing degree with ties broken by doc id. A group's offset
// is significant when |group_median - population_median| exceeds
// group_sem + population_sem (population_sem alone for size-1 groups).
std::vector<GroupClusterStat> group_cluster_stats(
    const LsaModel& model, const CampaignManifest& manifest, int component,
    GroupMode mode, std::size_t top_g);

}  // namespace spearlens
