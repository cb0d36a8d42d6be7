#pragma once

#include "atlas/clustering.hpp"
#include "atlas/corpus.hpp"
#include "atlas/embedding.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace atlas {

/// Successor limit meaning "keep every forward pair".
inline constexpr std::size_t kAllSuccessors = std::numeric_limits<std::size_t>::max();

struct CandidateEdge {
    std::size_t source = 0;  // index into StrengthGraph::event_ids
    std::size_t target = 0;
    double coherence = 0.0;
    double acceptance = 0.0;
    double strength = 0.0;

    bool operator==(const CandidateEdge&) const = default;
};

/// Temporally forward candidate edges over a corpus. Indices follow the
/// corpus total order, so source < target holds for every edge.
struct StrengthGraph {
    std::vector<std::string> event_ids;
    std::vector<CandidateEdge> edges;  // sorted by (source, target)
    std::uint64_t params_fingerprint = 0;

    std::size_t num_events() const { return event_ids.size(); }
};

/// sqrt(angular_similarity * cluster_similarity).
double coherence(std::span<const double> embedding_i, std::span<const double> embedding_j,
                 std::span<const double> membership_i, std::span<const double> membership_j);

/// sqrt(sp_i * sp_j) * sqrt(ur_i * ur_j).
double acceptance(double percentile_i, double percentile_j, double upvote_ratio_i, double upvote_ratio_j);

/// Keeps, per event, the `max_successors` strongest later events (ties go to
/// the earlier successor).
StrengthGraph build_strength_graph(const Corpus& corpus, const EmbeddingTable& table,
                                   const MembershipMatrix& memberships,
                                   std::size_t max_successors = 20);

/// Tab-separated edge table: id_i, id_j, coherence, acceptance, strength.
void write_strength_table(std::ostream& out, const StrengthGraph& graph);

}  // namespace atlas
