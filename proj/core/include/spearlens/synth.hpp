#pragma once

#include <cstdint>

#include "spearlens/corpus.hpp"

namespace spearlens {

// Synthetic campaign generator. Documents draw 80% of their tokens from a
// dominant topic vocabulary and 20% from a shared vocabulary, both under a
// Zipf(1.1) rank distribution so idf weighting is exercised nontrivially.
struct SynthConfig {
    int n_topics = 5;
    int vocab_per_topic = 400;
    int shared_vocab = 200;
    int n_adversaries = 58;
    int n_targets = 100;
    int doc_length = 250;  // tokens per document

    // theta: probability an email goes to a uniformly chosen same-topic
    // target instead of a uniformly chosen arbitrary target.
    double targeting_strength = 0.5;

    int emails_per_adversary = 5;
    std::uint64_t seed = 42;
};

// Adversary and target documents plus attack edges drawn under theta.
// Documents carry metadata "topic". Deterministic per seed.
CampaignManifest generate(const SynthConfig& config);

// A three-category labeled corpus without edges (requires n_topics == 3);
// n_targets documents per category, metadata "topic" and "category".
CampaignManifest benchmark_corpus(const SynthConfig& config);

// A campaign with engineered per-target attacker clusters: adversaries are
// topical, target text is drawn from the shared vocabulary only, and each
// target is attacked by `attackers_per_target` distinct same-topic
// adversaries. Attacker groups of one target therefore cluster semantically
// while any one adversary's recipients do not.
CampaignManifest clustered_campaign(const SynthConfig& config,
                                    int attackers_per_target);

}  // namespace spearlens
