#pragma once

#include "atlas/embedding.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace atlas {

/// Soft cluster memberships per event, one probability vector each.
struct MembershipMatrix {
    std::size_t num_clusters = 0;
    std::map<std::string, std::vector<double>> membership;
    std::vector<std::vector<double>> centroids;  // unit vectors, diagnostic only
    std::uint64_t seed = 0;
    std::size_t iterations = 0;

    /// Throws UnclusteredEvent for unknown ids.
    const std::vector<double>& of(const std::string& id) const;

    bool operator==(const MembershipMatrix&) const = default;
};

struct SoftClusterOptions {
    std::size_t num_clusters = 2;
    std::uint64_t seed = 0;
    double temperature = 0.1;
    std::size_t max_iterations = 300;
    double tolerance = 1e-6;
};

/// Spherical k-means (k-means++ seeding, cosine assignment) followed by a
/// temperature softmax over centroid dot products.
MembershipMatrix soft_cluster(const EmbeddingTable& table, const std::vector<std::string>& ids,
                              const SoftClusterOptions& options);

/// ceil(sqrt(n / 2)) clamped to [2, 12], and never above n.
std::size_t default_cluster_count(std::size_t num_events);

/// Base-2 Jensen-Shannon divergence, in [0, 1].
double jensen_shannon_divergence(std::span<const double> p, std::span<const double> q);

/// 1 - JSD(p, q).
double cluster_similarity(std::span<const double> p, std::span<const double> q);

/// sqrt(p[k] * q[k]): how much the connection between two events belongs to
/// cluster k.
double edge_membership(std::span<const double> p, std::span<const double> q, std::size_t k);

}  // namespace atlas
