#pragma once

#include "atlas/clustering.hpp"
#include "atlas/corpus.hpp"
#include "atlas/narrative_lp.hpp"
#include "atlas/strength.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace atlas {

enum class RouteCriterion { Bottleneck, MaxProduct };

const char* to_string(RouteCriterion c);
/// Accepts "bottleneck" and "max-product".
std::optional<RouteCriterion> parse_route_criterion(const std::string& text);

/// Integral map structure over graph event indices, before presentation.
struct MapSkeleton {
    std::vector<std::string> event_ids;  // all graph events, indexed like the strength graph
    std::vector<std::size_t> events;     // kept event indices, ascending
    std::vector<CandidateEdge> edges;    // kept edges, sorted by (source, target)
    std::vector<double> edge_values;     // LP value of each kept edge
    std::size_t start = 0;
    std::size_t end = 0;

    double avg_score_percentile = 0.0;
    bool acceptance_shortfall = false;          // repair could not reach minscore
    std::vector<std::size_t> removed_for_acceptance;

    bool contains(std::size_t event) const;
};

struct RoundingOptions {
    double tau = 0.5;         // relative to the largest LP edge value
    double minscore = 0.85;
    RouteCriterion criterion = RouteCriterion::Bottleneck;
};

/// Among edges with LP support, every event keeps its most coherent incoming
/// and outgoing edge (ties: higher strength); edges whose LP value is at
/// least tau times the largest edge value are kept as well. Events off every
/// start-to-end path are pruned, then low-percentile events outside the main
/// route are dropped until the average percentile reaches minscore. Throws
/// EmptyMap when no start-to-end route survives.
MapSkeleton round_solution(const LpSolution& solution, const StrengthGraph& graph,
                           const std::vector<double>& percentiles, const RoundingOptions& options);

/// Builds a skeleton directly from an edge list; every event touched by an
/// edge plus start and end is kept. Used for what-if maps and tests.
MapSkeleton make_skeleton(std::vector<std::string> event_ids, std::vector<CandidateEdge> edges,
                          std::size_t start, std::size_t end);

/// Start-to-end path. Bottleneck: maximizes the minimum edge strength, then
/// the strength product, then takes the lexicographically smallest id
/// sequence. MaxProduct drops the first criterion. Throws NoMainRoute.
std::vector<std::size_t> main_route(const MapSkeleton& skeleton,
                                    RouteCriterion criterion = RouteCriterion::Bottleneck);

struct StorylineCover {
    std::vector<std::vector<std::size_t>> paths;  // event indices in time order
    bool main_route_split = false;  // no minimum cover keeps the route whole
};

/// Minimum vertex-disjoint path cover over the kept edges via bipartite
/// matching. When a minimum cover can contain `route` as one path it does,
/// as path 0; remaining paths are ordered by first event.
StorylineCover decompose_storylines(const MapSkeleton& skeleton, const std::vector<std::size_t>& route);

/// Size of a minimum path cover, without storyline ordering concerns.
std::size_t minimum_path_cover_size(const MapSkeleton& skeleton);

/// One landmark per storyline whose time span contains the earliest instant
/// of maximum width; empty with fewer than two storylines. Event indices
/// follow corpus ranks.
std::vector<std::size_t> representative_landmarks(const MapSkeleton& skeleton,
                                                  const std::vector<std::vector<std::size_t>>& storylines,
                                                  const Corpus& corpus);

struct CoverageReport {
    std::vector<double> per_cluster;
    double average = 0.0;
};

/// min(1, sum of edge memberships over kept edges) per cluster.
CoverageReport coverage_report(const MapSkeleton& skeleton, const MembershipMatrix& memberships);

struct MapNode {
    std::string id;
    std::string title;
    std::int64_t created_at = 0;
    std::int64_t score = 0;
    double upvote_ratio = 0.0;
    double score_percentile = 0.0;
    std::size_t storyline = 0;
    bool landmark = false;
    bool on_main_route = false;
    bool operator==(const MapNode&) const = default;
};

struct MapEdge {
    std::string source;
    std::string target;
    double coherence = 0.0;
    double acceptance = 0.0;
    double strength = 0.0;
    double lp_value = 0.0;
    bool on_main_route = false;
    bool operator==(const MapEdge&) const = default;
};

struct Storyline {
    std::size_t id = 0;
    std::vector<std::string> events;
    std::optional<double> mean_strength;  // absent for single-event storylines
    double mean_acceptance = 0.0;         // mean of sqrt(percentile * upvote ratio)
    bool operator==(const Storyline&) const = default;
};

struct MapDiagnostics {
    double avg_score_percentile = 0.0;
    double minscore = 0.0;
    bool acceptance_shortfall = false;
    std::vector<std::string> removed_for_acceptance;
    std::vector<double> cluster_coverage;
    double average_coverage = 0.0;
    double mincover = 0.0;
    double lp_objective = 0.0;
    double rounded_min_strength = 0.0;
    std::size_t main_route_length = 0;  // events on the main route
    bool main_route_split = false;
    bool integral_feasible = false;     // the rounded map satisfies every LP constraint as a 0/1 point
    bool operator==(const MapDiagnostics&) const = default;
};

struct NarrativeMap {
    std::vector<MapNode> nodes;  // corpus order
    std::vector<MapEdge> edges;  // sorted by (source rank, target rank)
    std::vector<std::string> main_route;
    std::vector<Storyline> storylines;
    std::vector<std::string> landmarks;
    MapDiagnostics diagnostics;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();  // echoed verbatim into exports
    bool operator==(const NarrativeMap&) const = default;
};

/// Everything needed to present a rounded skeleton.
struct MapContext {
    const Corpus& corpus;
    const MembershipMatrix& memberships;
    const LpModel& model;
    const LpSolution& solution;
    RouteCriterion criterion = RouteCriterion::Bottleneck;
};

NarrativeMap build_narrative_map(const MapSkeleton& skeleton, const MapContext& context);

/// Checks the rounded map as a 0/1 assignment against the program.
bool is_integral_feasible(const MapSkeleton& skeleton, const LpModel& model, double tolerance = 1e-9);

/// Structured export (schema_version 1). Key order is fixed so serialized
/// output is byte-stable.
nlohmann::ordered_json to_document(const NarrativeMap& map);
/// to_document pretty-printed with a trailing newline; the bytes that are
/// hashed into map ids and written by the CLI.
std::string to_document_text(const NarrativeMap& map);
/// Inverse of to_document. Throws InvalidConfig on schema mismatch.
NarrativeMap map_from_document(const nlohmann::ordered_json& document);
/// Graphviz DOT: main-route edges dashed blue, landmarks double-bordered.
void write_dot(std::ostream& out, const NarrativeMap& map);
std::string to_dot(const NarrativeMap& map);

}  // namespace atlas
