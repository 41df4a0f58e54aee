#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "spearlens/corpus.hpp"
#include "spearlens/errors.hpp"
#include "spearlens/similarity.hpp"
#include "spearlens/synth.hpp"
#include "spearlens/vectorizer.hpp"

using namespace spearlens;

namespace {

SynthConfig small_config() {
    SynthConfig config;
    config.n_topics = 4;
    config.vocab_per_topic = 60;
    config.shared_vocab = 30;
    config.n_adversaries = 12;
    config.n_targets = 20;
    config.doc_length = 60;
    config.targeting_strength = 0.5;
    config.emails_per_adversary = 3;
    return config;
}

std::string topic_of(const CampaignManifest& manifest, const std::string& id) {
    return manifest.find(id)->metadata.at("topic");
}

}  // namespace

TEST_CASE("theta = 1 connects same-topic endpoints only") {
    SynthConfig config = small_config();
    config.n_topics = 2;
    config.targeting_strength = 1.0;
    const CampaignManifest manifest = generate(config);
    CHECK_FALSE(manifest.edges.empty());
    for (const Edge& edge : manifest.edges) {
        CHECK(topic_of(manifest, edge.adversary) ==
              topic_of(manifest, edge.target));
    }
}

TEST_CASE("theta = 0 makes endpoint topics independent") {
    SynthConfig config = small_config();
    config.targeting_strength = 0.0;
    config.n_adversaries = 50;
    config.n_targets = 200;
    config.emails_per_adversary = 20;  // ~1000 edges
    const CampaignManifest manifest = generate(config);

    std::size_t same_topic = 0;
    for (const Edge& edge : manifest.edges) {
        same_topic += topic_of(manifest, edge.adversary) ==
                      topic_of(manifest, edge.target);
    }
    const double n = static_cast<double>(manifest.edges.size());
    const double p = 1.0 / config.n_topics;
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(static_cast<double>(same_topic) / n - p) < 3.0 * sigma);
}

TEST_CASE("same seed reproduces the manifest byte for byte") {
    const SynthConfig config = small_config();
    const CampaignManifest a = generate(config);
    const CampaignManifest b = generate(config);
    REQUIRE(a.documents.size() == b.documents.size());
    for (std::size_t i = 0; i < a.documents.size(); ++i) {
        CHECK(a.documents[i].id == b.documents[i].id);
        CHECK(a.documents[i].text == b.documents[i].text);
        CHECK(a.documents[i].metadata == b.documents[i].metadata);
    }
    REQUIRE(a.edges.size() == b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        CHECK(a.edges[i].adversary == b.edges[i].adversary);
        CHECK(a.edges[i].target == b.edges[i].target);
        CHECK(a.edges[i].count == b.edges[i].count);
    }

    SynthConfig other = config;
    other.seed = config.seed + 1;
    const CampaignManifest c = generate(other);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.documents.size(); ++i) {
        any_difference = any_difference ||
                         a.documents[i].text != c.documents[i].text;
    }
    CHECK(any_difference);
}

TEST_CASE("generated documents survive the tokenizer unchanged") {
    const CampaignManifest manifest = generate(small_config());
    const Document& doc = manifest.documents[0];
    const auto tokens = tokenize(doc.text);
    CHECK(tokens.size() == static_cast<std::size_t>(small_config().doc_length));
    const StopWordSet stops = StopWordSet::builtin_english();
    for (const auto& token : tokens) CHECK_FALSE(stops.contains(token));
}

TEST_CASE("infeasible targeting is rejected, untargeted is not") {
    SynthConfig config = small_config();
    config.n_topics = 5;
    config.n_targets = 3;  // topics 3 and 4 have no targets
    config.n_adversaries = 10;
    config.targeting_strength = 0.5;
    CHECK_THROWS_AS(generate(config), ValidationError);

    config.targeting_strength = 0.0;
    CHECK_NOTHROW(generate(config));
}

TEST_CASE("config validation") {
    SynthConfig config = small_config();
    config.targeting_strength = 1.5;
    CHECK_THROWS_AS(generate(config), ValidationError);
    config = small_config();
    config.n_adversaries = 0;
    CHECK_THROWS_AS(generate(config), ValidationError);
    config = small_config();
    config.doc_length = 0;
    CHECK_THROWS_AS(generate(config), ValidationError);
}

TEST_CASE("benchmark corpus shape") {
    SynthConfig config = small_config();
    config.n_topics = 3;
    config.n_targets = 40;
    const CampaignManifest corpus = benchmark_corpus(config);
    CHECK(corpus.documents.size() == 120);
    CHECK(corpus.edges.empty());

    std::map<std::string, std::size_t> categories;
    for (const Document& doc : corpus.documents) {
        ++categories[doc.metadata.at("category")];
    }
    REQUIRE(categories.size() == 3);
    for (const auto& [category, count] : categories) CHECK(count == 40);

    config.n_topics = 4;
    CHECK_THROWS_AS(benchmark_corpus(config), ValidationError);
}

TEST_CASE("benchmark corpus: within-category similarity beats cross-category") {
    SynthConfig config = small_config();
    config.n_topics = 3;
    config.n_targets = 25;
    config.doc_length = 80;
    const CampaignManifest corpus = benchmark_corpus(config);
    const TfIdfMatrix matrix =
        fit_transform(ngram_streams(corpus, 1, StopWordSet{}));

    double within = 0.0, cross = 0.0;
    std::size_t n_within = 0, n_cross = 0;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        for (std::size_t j = i + 1; j < corpus.documents.size(); ++j) {
            const double value = cosine(matrix.matrix.rows[i],
                                        matrix.matrix.rows[j]);
            if (corpus.documents[i].metadata.at("category") ==
                corpus.documents[j].metadata.at("category")) {
                within += value;
                ++n_within;
            } else {
                cross += value;
                ++n_cross;
            }
        }
    }
    CHECK(within / static_cast<double>(n_within) >
          cross / static_cast<double>(n_cross));
}

TEST_CASE("clustered campaign engineering") {
    SynthConfig config = small_config();
    config.n_topics = 3;
    config.n_adversaries = 24;
    config.n_targets = 9;
    const int attackers = 5;
    const CampaignManifest manifest = clustered_campaign(config, attackers);

    // Every target is attacked by exactly `attackers` same-cluster-topic
    // adversaries; target text itself is shared-vocabulary only.
    std::map<std::string, std::set<std::string>> attackers_of;
    for (const Edge& edge : manifest.edges) {
        attackers_of[edge.target].insert(edge.adversary);
    }
    CHECK(attackers_of.size() == 9);
    for (const auto& [target, group] : attackers_of) {
        CHECK(group.size() == attackers);
        const std::string cluster_topic =
            manifest.find(target)->metadata.at("cluster_topic");
        for (const auto& adversary : group) {
            CHECK(topic_of(manifest, adversary) == cluster_topic);
        }
    }
    for (const Document& doc : manifest.documents) {
        if (doc.role == Role::Target) {
            CHECK(doc.text.find("t0w") == std::string::npos);
            CHECK(doc.text.find("sw") != std::string::npos);
        }
    }

    // Needs at least attackers_per_target adversaries per topic.
    config.n_adversaries = 6;  // 2 per topic
    CHECK_THROWS_AS(clustered_campaign(config, attackers), ValidationError);
}
