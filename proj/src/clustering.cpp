#include "atlas/clustering.hpp"

#include "atlas/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace atlas {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize(std::vector<double>& v) {
    double n = std::sqrt(dot(v, v));
    if (n > 0.0)
        for (double& x : v) x /= n;
}

void check_distribution(std::span<const double> p, const char* name) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw Error(ErrorKind::InvalidDistribution, std::string("invalid distribution: ") + name + " has a negative or non-finite entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error(ErrorKind::InvalidDistribution, std::string("invalid distribution: ") + name + " sums to " + std::to_string(sum));
}

double kl_to_mixture(std::span<const double> p, std::span<const double> q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        double m = 0.5 * (p[i] + q[i]);
        s += p[i] * std::log2(p[i] / m);
    }
    return s;
}

// k-means++ on cosine distance. Identical points yield zero weights, in which
// case the next centre is drawn uniformly.
std::vector<std::vector<double>> seed_centroids(const std::vector<std::span<const double>>& points, std::size_t k,
                                                std::mt19937_64& rng) {
    const std::size_t n = points.size();
    std::vector<std::vector<double>> centroids;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t first = pick(rng);
    centroids.emplace_back(points[first].begin(), points[first].end());

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 1.0 - dot(points[i], centroids[0]);
        d2[i] = std::max(0.0, d) * std::max(0.0, d);
    }
    while (centroids.size() < k) {
        double total = 0.0;
        for (double w : d2) total += w;
        std::size_t chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double r = u(rng), acc = 0.0;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (r < acc) { chosen = i; break; }
            }
        } else {
            chosen = pick(rng);
        }
        centroids.emplace_back(points[chosen].begin(), points[chosen].end());
        for (std::size_t i = 0; i < n; ++i) {
            double d = std::max(0.0, 1.0 - dot(points[i], centroids.back()));
            d2[i] = std::min(d2[i], d * d);
        }
    }
    return centroids;
}

}  // namespace

const std::vector<double>& MembershipMatrix::of(const std::string& id) const {
    auto it = membership.find(id);
    if (it == membership.end()) throw Error(ErrorKind::UnclusteredEvent, "unclustered event '" + id + "'");
    return it->second;
}

std::size_t default_cluster_count(std::size_t num_events) {
    auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(num_events) / 2.0)));
    k = std::clamp<std::size_t>(k, 2, 12);
    return std::min(k, num_events);
}

MembershipMatrix soft_cluster(const EmbeddingTable& table, const std::vector<std::string>& ids,
                              const SoftClusterOptions& options) {
    const std::size_t n = ids.size();
    const std::size_t k = options.num_clusters;
    if (k < 2 || k > n)
        throw Error(ErrorKind::InvalidClusterCount, "invalid cluster count " + std::to_string(k) + " for " +
                                                        std::to_string(n) + " events");
    if (!(options.temperature > 0.0)) throw Error(ErrorKind::InvalidConfig, "cluster temperature must be positive");

    std::vector<std::span<const double>> points;
    points.reserve(n);
    for (const auto& id : ids) points.push_back(table.at(id));

    std::mt19937_64 rng(options.seed);
    auto centroids = seed_centroids(points, k, rng);
    const std::size_t dim = table.dim();

    std::vector<std::size_t> assignment(n, k);
    std::size_t iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_dot = dot(points[i], centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                double d = dot(points[i], centroids[c]);
                if (d > best_dot) { best = c; best_dot = d; }
            }
            if (assignment[i] != best) { assignment[i] = best; changed = true; }
        }

        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[assignment[i]];
            for (std::size_t d = 0; d < dim; ++d) s[d] += points[i][d];
            ++counts[assignment[i]];
        }
        double max_shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its centre
            normalize(sums[c]);
            if (dot(sums[c], sums[c]) == 0.0) continue;
            max_shift = std::max(max_shift, 1.0 - dot(sums[c], centroids[c]));
            centroids[c] = std::move(sums[c]);
        }
        if (!changed || max_shift < options.tolerance) { ++iter; break; }
    }

    MembershipMatrix out;
    out.num_clusters = k;
    out.seed = options.seed;
    out.iterations = iter;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> logits(k);
        for (std::size_t c = 0; c < k; ++c) logits[c] = dot(points[i], centroids[c]) / options.temperature;
        double mx = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (double& l : logits) { l = std::exp(l - mx); z += l; }
        for (double& l : logits) l /= z;
        out.membership[ids[i]] = std::move(logits);
    }
    out.centroids = std::move(centroids);
    return out;
}

double jensen_shannon_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size() || p.empty())
        throw Error(ErrorKind::InvalidDistribution, "invalid distribution: length mismatch");
    check_distribution(p, "p");
    check_distribution(q, "q");
    double jsd = 0.5 * kl_to_mixture(p, q) + 0.5 * kl_to_mixture(q, p);
    return std::clamp(jsd, 0.0, 1.0);
}

double cluster_similarity(std::span<const double> p, std::span<const double> q) {
    return 1.0 - jensen_shannon_divergence(p, q);
}

double edge_membership(std::span<const double> p, std::span<const double> q, std::size_t k) {
    if (k >= p.size() || k >= q.size())
        throw Error(ErrorKind::InvalidClusterIndex, "invalid cluster index " + std::to_string(k));
    return std::sqrt(p[k] * q[k]);
}

}  // namespace atlas
