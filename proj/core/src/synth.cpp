#include "spearlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "spearlens/errors.hpp"

namespace spearlens {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

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

// Inverse-CDF sampler over ranks 0..n-1 with weight 1/(r+1)^exponent.
class ZipfSampler {
public:
    ZipfSampler(int n, double exponent) : cumulative_(n) {
        double total = 0.0;
        for (int r = 0; r < n; ++r) {
            total += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
            cumulative_[r] = total;
        }
    }

    int sample(std::mt19937_64& rng) const {
        const double u = uniform01(rng) * cumulative_.back();
        const auto it =
            std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
        return static_cast<int>(it - cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
};

constexpr double kZipfExponent = 1.1;
constexpr double kTopicTokenShare = 0.8;

std::string topic_word(int topic, int rank) {
    return "t" + std::to_string(topic) + "w" + std::to_string(rank);
}

std::string shared_word(int rank) { return "sw" + std::to_string(rank); }

std::string padded_id(char prefix, int index, int total) {
    int digits = 1;
    for (int v = total - 1; v >= 10; v /= 10) ++digits;
    std::string number = std::to_string(index);
    return prefix + std::string(digits - number.size(), '0') + number;
}

void check_config(const SynthConfig& config) {
    if (config.n_topics < 1 || config.vocab_per_topic < 1 ||
        config.shared_vocab < 1 || config.n_adversaries < 1 ||
        config.n_targets < 1 || config.doc_length < 1 ||
        config.emails_per_adversary < 1) {
        throw ValidationError("synth config: all counts must be >= 1");
    }
    if (config.targeting_strength < 0.0 || config.targeting_strength > 1.0) {
        throw ValidationError("synth config: targeting strength must be in [0, 1]");
    }
}

// doc_length tokens: a topical token with probability kTopicTokenShare,
// otherwise a shared-vocabulary token. topic < 0 draws shared tokens only.
std::string make_text(int topic, const SynthConfig& config,
                      const ZipfSampler& topic_zipf,
                      const ZipfSampler& shared_zipf, std::mt19937_64& rng) {
    std::string text;
    for (int t = 0; t < config.doc_length; ++t) {
        if (!text.empty()) text += ' ';
        if (topic >= 0 && uniform01(rng) < kTopicTokenShare) {
            text += topic_word(topic, topic_zipf.sample(rng));
        } else {
            text += shared_word(shared_zipf.sample(rng));
        }
    }
    return text;
}

std::vector<Edge> collapse_edges(
    const std::map<std::pair<int, int>, std::uint32_t>& counts,
    const std::vector<std::string>& adversary_ids,
    const std::vector<std::string>& target_ids) {
    std::vector<Edge> edges;
    edges.reserve(counts.size());
    for (const auto& [pair, count] : counts) {
        edges.push_back(
            Edge{adversary_ids[pair.first], target_ids[pair.second], count});
    }
    return edges;
}

}  // namespace

CampaignManifest generate(const SynthConfig& config) {
    check_config(config);

    // Round-robin topic assignment keeps topic sizes balanced on both sides.
    std::vector<int> adversary_topic(config.n_adversaries);
    std::vector<int> target_topic(config.n_targets);
    for (int i = 0; i < config.n_adversaries; ++i) {
        adversary_topic[i] = i % config.n_topics;
    }
    for (int j = 0; j < config.n_targets; ++j) {
        target_topic[j] = j % config.n_topics;
    }

    std::vector<std::vector<int>> targets_of_topic(config.n_topics);
    for (int j = 0; j < config.n_targets; ++j) {
        targets_of_topic[target_topic[j]].push_back(j);
    }
    if (config.targeting_strength > 0.0) {
        for (int i = 0; i < config.n_adversaries; ++i) {
            if (targets_of_topic[adversary_topic[i]].empty()) {
                throw ValidationError(
                    "infeasible synth config: no targets share topic " +
                    std::to_string(adversary_topic[i]) +
                    " with adversary " + std::to_string(i));
            }
        }
    }

    std::mt19937_64 rng(config.seed);
    const ZipfSampler topic_zipf(config.vocab_per_topic, kZipfExponent);
    const ZipfSampler shared_zipf(config.shared_vocab, kZipfExponent);

    CampaignManifest manifest;
    std::vector<std::string> adversary_ids, target_ids;
    for (int i = 0; i < config.n_adversaries; ++i) {
        Document doc;
        doc.id = padded_id('A', i, config.n_adversaries);
        doc.role = Role::Adversary;
        doc.text = make_text(adversary_topic[i], config, topic_zipf,
                             shared_zipf, rng);
        doc.metadata["topic"] = std::to_string(adversary_topic[i]);
        adversary_ids.push_back(doc.id);
        manifest.documents.push_back(std::move(doc));
    }
    for (int j = 0; j < config.n_targets; ++j) {
        Document doc;
        doc.id = padded_id('T', j, config.n_targets);
        doc.role = Role::Target;
        doc.text =
            make_text(target_topic[j], config, topic_zipf, shared_zipf, rng);
        doc.metadata["topic"] = std::to_string(target_topic[j]);
        target_ids.push_back(doc.id);
        manifest.documents.push_back(std::move(doc));
    }

    std::map<std::pair<int, int>, std::uint32_t> counts;
    for (int i = 0; i < config.n_adversaries; ++i) {
        const auto& same_topic = targets_of_topic[adversary_topic[i]];
        for (int e = 0; e < config.emails_per_adversary; ++e) {
            int target;
            if (uniform01(rng) < config.targeting_strength) {
                target = same_topic[bounded(rng, same_topic.size())];
            } else {
                target = static_cast<int>(
                    bounded(rng, static_cast<std::uint64_t>(config.n_targets)));
            }
            ++counts[{i, target}];
        }
    }
    manifest.edges = collapse_edges(counts, adversary_ids, target_ids);

    validate_manifest(manifest);
    return manifest;
}

CampaignManifest benchmark_corpus(const SynthConfig& config) {
    check_config(config);
    if (config.n_topics != 3) {
        throw ValidationError(
            "benchmark corpus is defined for exactly 3 categories; set "
            "n_topics = 3");
    }
    static const char* kCategories[] = {"postdoc", "manager",
                                        "software_engineer"};

    std::mt19937_64 rng(config.seed);
    const ZipfSampler topic_zipf(config.vocab_per_topic, kZipfExponent);
    const ZipfSampler shared_zipf(config.shared_vocab, kZipfExponent);

    // n_targets documents per category, no edges.
    CampaignManifest manifest;
    for (int topic = 0; topic < 3; ++topic) {
        for (int d = 0; d < config.n_targets; ++d) {
            Document doc;
            doc.id = std::string(kCategories[topic]) + "_" +
                     padded_id('d', d, config.n_targets);
            doc.role = Role::Target;
            doc.text =
                make_text(topic, config, topic_zipf, shared_zipf, rng);
            doc.metadata["topic"] = std::to_string(topic);
            doc.metadata["category"] = kCategories[topic];
            manifest.documents.push_back(std::move(doc));
        }
    }
    validate_manifest(manifest);
    return manifest;
}

CampaignManifest clustered_campaign(const SynthConfig& config,
                                    int attackers_per_target) {
    check_config(config);
    if (attackers_per_target < 1) {
        throw ValidationError("attackers_per_target must be >= 1");
    }

    std::vector<int> adversary_topic(config.n_adversaries);
    std::vector<std::vector<int>> adversaries_of_topic(config.n_topics);
    for (int i = 0; i < config.n_adversaries; ++i) {
        adversary_topic[i] = i % config.n_topics;
        adversaries_of_topic[adversary_topic[i]].push_back(i);
    }
    for (int t = 0; t < config.n_topics; ++t) {
        if (static_cast<int>(adversaries_of_topic[t].size()) <
            attackers_per_target) {
            throw ValidationError(
                "infeasible clustered campaign: topic " + std::to_string(t) +
                " has fewer than attackers_per_target adversaries");
        }
    }

    std::mt19937_64 rng(config.seed);
    const ZipfSampler topic_zipf(config.vocab_per_topic, kZipfExponent);
    const ZipfSampler shared_zipf(config.shared_vocab, kZipfExponent);

    CampaignManifest manifest;
    std::vector<std::string> adversary_ids, target_ids;
    for (int i = 0; i < config.n_adversaries; ++i) {
        Document doc;
        doc.id = padded_id('A', i, config.n_adversaries);
        doc.role = Role::Adversary;
        doc.text = make_text(adversary_topic[i], config, topic_zipf,
                             shared_zipf, rng);
        doc.metadata["topic"] = std::to_string(adversary_topic[i]);
        adversary_ids.push_back(doc.id);
        manifest.documents.push_back(std::move(doc));
    }
    for (int j = 0; j < config.n_targets; ++j) {
        Document doc;
        doc.id = padded_id('T', j, config.n_targets);
        doc.role = Role::Target;
        // Topic-free text: recipient groups carry no semantic signal.
        doc.text = make_text(-1, config, topic_zipf, shared_zipf, rng);
        doc.metadata["cluster_topic"] = std::to_string(j % config.n_topics);
        target_ids.push_back(doc.id);
        manifest.documents.push_back(std::move(doc));
    }

    std::map<std::pair<int, int>, std::uint32_t> counts;
    for (int j = 0; j < config.n_targets; ++j) {
        // Partial Fisher-Yates over the same-topic adversary pool.
        std::vector<int> pool = adversaries_of_topic[j % config.n_topics];
        for (int pick = 0; pick < attackers_per_target; ++pick) {
            const auto r =
                pick + bounded(rng, pool.size() - static_cast<std::size_t>(pick));
            std::swap(pool[pick], pool[r]);
            ++counts[{pool[pick], j}];
        }
    }
    manifest.edges = collapse_edges(counts, adversary_ids, target_ids);

    validate_manifest(manifest);
    return manifest;
}

}  // namespace spearlens
