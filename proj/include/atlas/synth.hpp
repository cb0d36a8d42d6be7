#pragma once

#include "atlas/corpus.hpp"
#include "atlas/embedding.hpp"
#include "atlas/mapgraph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace atlas {

/// How the community received a planted chain.
///   accepted: scores 500..1500, upvote ratio in [0.85, 1]
///   rejected: scores -20..40, upvote ratio in [0.2, 0.5]
///   neutral:  score 100, upvote ratio 0.9
enum class AcceptanceProfile { Accepted, Rejected, Neutral };

const char* to_string(AcceptanceProfile p);
/// Throws InvalidProfile for unknown names.
AcceptanceProfile parse_acceptance_profile(const std::string& text);

struct PlantedSpec {
    std::vector<std::size_t> chain_lengths;      // one entry per chain, each >= 2
    std::vector<AcceptanceProfile> profiles;     // one per chain, or a single shared profile
    double noise_sigma = 0.05;                   // per-coordinate step of the within-chain drift
    std::uint64_t seed = 0;
    std::size_t dim = 32;
    std::string community = "synthetic";
    std::int64_t start_time = 1625616000;        // 2021-07-07T00:00:00Z
    std::int64_t span_seconds = 11 * 86400;
};

struct PlantedCorpus {
    Corpus corpus;
    EmbeddingTable embeddings;
    std::vector<std::vector<std::string>> planted;  // chains in time order
    std::vector<AcceptanceProfile> profiles;        // per chain
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    /// Chain index of an event id, if planted.
    std::optional<std::size_t> chain_of(const std::string& id) const;
};

/// Chain c has a random unit anchor a_c; its events carry
/// normalize(a_c + w_i) with w_0 = 0 and w_i = w_{i-1} + N(0, sigma^2 I), so
/// neighbours in a chain are closer than distant members and far closer than
/// other chains. Chain 0 holds the earliest and the latest event; every other
/// event falls strictly between them. Throws InvalidProfile.
PlantedCorpus generate_planted_corpus(const PlantedSpec& spec);

struct RecoveryMetrics {
    double adjacency_recall = 0.0;
    double adjacency_precision = 0.0;
    double landmark_hit_rate = 0.0;
    double main_route_purity = 0.0;
    std::optional<std::size_t> majority_chain;  // chain contributing most main-route events
};

/// Recall counts a planted consecutive pair (a, b) when the map has the edge
/// a->b or b follows a within two steps in one storyline. Precision is the
/// share of map edges joining members of one chain at most two positions
/// apart. Landmark hit rate is the share of chains present in the map that
/// hold a landmark (1 when the map shows a single chain and no landmarks).
/// Throws ForeignMap for ids outside the planted corpus.
RecoveryMetrics evaluate_recovery(const NarrativeMap& map, const PlantedCorpus& planted);

}  // namespace atlas
