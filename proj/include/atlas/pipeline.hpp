#pragma once

#include "atlas/corpus.hpp"
#include "atlas/embedding.hpp"
#include "atlas/mapgraph.hpp"
#include "atlas/narrative_lp.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace atlas {

struct ExtractionConfig {
    std::string keyword;                      // empty matches every post
    std::optional<std::int64_t> from;         // inclusive, seconds since epoch
    std::optional<std::int64_t> to;
    std::string community;                    // empty: the community with the most posts
    std::size_t K = 8;
    double mincover = 0.5;
    double minscore = 0.85;
    std::optional<std::size_t> num_clusters;  // empty: ceil(sqrt(n / 2)) clamped to [2, 12]
    std::uint64_t seed = 0;
    double temperature = 0.1;
    std::size_t max_successors = 20;          // kAllSuccessors keeps every forward pair
    double tau = 0.5;
    RouteCriterion main_route = RouteCriterion::Bottleneck;
};

/// Throws InvalidConfig naming the offending key, e.g. "minscore out of range".
void validate(const ExtractionConfig& config);

/// Effective configuration with every default spelled out. Key order is fixed.
nlohmann::ordered_json config_to_json(const ExtractionConfig& config);

/// Sets one key from its textual form. Keys: keyword, from, to, community,
/// K (or k), mincover, minscore, num_clusters ("auto" or a count), seed,
/// temperature, max_successors ("all" or a count), tau, main_route. Times
/// accept epoch seconds or ISO dates (2021-07-07 or 2021-07-07T12:00:00Z).
void apply_setting(ExtractionConfig& config, const std::string& key, const std::string& value);

/// Reads "key = value" lines; blank lines and lines starting with # are
/// ignored. Throws InvalidConfig with the line number.
ExtractionConfig load_config(std::istream& in, ExtractionConfig base = {});

/// Applies a JSON object of settings (values may be strings, numbers or null
/// for the optional keys). Unknown keys are rejected.
ExtractionConfig config_from_json(const nlohmann::json& object, ExtractionConfig base = {});

/// Parses epoch seconds or an ISO date/time in UTC.
std::int64_t parse_time(const std::string& text);

struct Telemetry {
    std::vector<std::pair<std::string, double>> stage_ms;
    double total_ms = 0.0;
    std::size_t events = 0;
    std::size_t candidate_edges = 0;
    std::size_t num_clusters = 0;
    std::size_t lp_rows = 0;
    std::size_t lp_variables = 0;
    std::size_t lp_iterations = 0;

    nlohmann::ordered_json to_json() const;
};

struct ExtractionResult {
    NarrativeMap map;      // params carry the effective config and input fingerprints
    Telemetry telemetry;   // wall-clock data, kept out of the map for byte-stable exports
};

/// Runs corpus selection and filtering, embedding lookup, soft clustering,
/// strength graph, LP, rounding and map assembly. Errors carry the stage that
/// raised them; infeasible programs raise Infeasible with messages such as
/// "acceptance constraint infeasible".
ExtractionResult extract(const ExtractionConfig& config, const CorpusSet& corpora, const EmbeddingTable& embeddings);

/// The community `extract` would analyse. Throws NotFound.
const Corpus& select_community(const ExtractionConfig& config, const CorpusSet& corpora);

/// Canonical bytes of a corpus set (every community in name order, ingest
/// format) and of an embedding table; the store hashes these.
std::string canonical_corpus_bytes(const CorpusSet& corpora);
std::string canonical_embedding_bytes(const EmbeddingTable& table);

}  // namespace atlas
