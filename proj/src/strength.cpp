#include "atlas/strength.hpp"

#include "atlas/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <ostream>

namespace atlas {

namespace {

// FNV-1a over the bit patterns of everything the graph depends on.
struct Fnv {
    std::uint64_t h = 1469598103934665603ull;
    void bytes(const void* p, std::size_t n) {
        auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) { h ^= c[i]; h *= 1099511628211ull; }
    }
    void str(const std::string& s) { bytes(s.data(), s.size()); bytes("\0", 1); }
    template <class T>
    void pod(const T& v) { bytes(&v, sizeof v); }
};

}  // namespace

double coherence(std::span<const double> embedding_i, std::span<const double> embedding_j,
                 std::span<const double> membership_i, std::span<const double> membership_j) {
    double angular = angular_similarity(embedding_i, embedding_j);
    double cluster = cluster_similarity(membership_i, membership_j);
    return std::sqrt(angular * cluster);
}

double acceptance(double percentile_i, double percentile_j, double upvote_ratio_i, double upvote_ratio_j) {
    return std::sqrt(percentile_i * percentile_j) * std::sqrt(upvote_ratio_i * upvote_ratio_j);
}

StrengthGraph build_strength_graph(const Corpus& corpus, const EmbeddingTable& table,
                                   const MembershipMatrix& memberships, std::size_t max_successors) {
    const std::size_t n = corpus.size();
    if (n < 2) throw Error(ErrorKind::InsufficientEvents, "insufficient events: need at least 2, have " + std::to_string(n));
    if (max_successors == 0) throw Error(ErrorKind::InvalidConfig, "max_successors must be at least 1");

    StrengthGraph graph;
    graph.event_ids.reserve(n);
    std::vector<std::span<const double>> emb(n);
    std::vector<const std::vector<double>*> mem(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = corpus.at(i);
        graph.event_ids.push_back(s.id);
        emb[i] = table.at(s.id);
        mem[i] = &memberships.of(s.id);
    }

    Fnv fp;
    fp.pod(max_successors);
    fp.pod(memberships.num_clusters);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = corpus.at(i);
        fp.str(s.id);
        fp.pod(corpus.percentile(i));
        fp.pod(s.upvote_ratio);
        for (double x : emb[i]) fp.pod(x);
        for (double x : *mem[i]) fp.pod(x);
    }
    graph.params_fingerprint = fp.h;

    std::vector<CandidateEdge> row;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        row.clear();
        const auto& si = corpus.at(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& sj = corpus.at(j);
            CandidateEdge e;
            e.source = i;
            e.target = j;
            e.coherence = coherence(emb[i], emb[j], *mem[i], *mem[j]);
            e.acceptance = acceptance(corpus.percentile(i), corpus.percentile(j), si.upvote_ratio, sj.upvote_ratio);
            e.strength = e.coherence * e.acceptance;
            row.push_back(e);
        }
        if (row.size() > max_successors) {
            std::stable_sort(row.begin(), row.end(),
                             [](const CandidateEdge& a, const CandidateEdge& b) { return a.strength > b.strength; });
            row.resize(max_successors);
            std::sort(row.begin(), row.end(),
                      [](const CandidateEdge& a, const CandidateEdge& b) { return a.target < b.target; });
        }
        graph.edges.insert(graph.edges.end(), row.begin(), row.end());
    }
    return graph;
}

void write_strength_table(std::ostream& out, const StrengthGraph& graph) {
    out << "id_i\tid_j\tcoherence\tacceptance\tstrength\n";
    out << std::setprecision(17);
    for (const auto& e : graph.edges)
        out << graph.event_ids[e.source] << '\t' << graph.event_ids[e.target] << '\t' << e.coherence << '\t'
            << e.acceptance << '\t' << e.strength << '\n';
}

}  // namespace atlas
