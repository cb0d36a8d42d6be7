#include "atlas/clustering.hpp"
#include "../support/errors.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace atlas;
using fixture::error_kind;

TEST_CASE("jensen-shannon examples") {
    const std::vector<double> half{0.5, 0.5}, a{1, 0}, b{0, 1};
    CHECK(jensen_shannon_divergence(half, half) == doctest::Approx(0.0));
    CHECK(jensen_shannon_divergence(a, b) == doctest::Approx(1.0));
    CHECK(jensen_shannon_divergence(half, a) == doctest::Approx(0.3113).epsilon(1e-4));
    CHECK(cluster_similarity(half, half) == doctest::Approx(1.0));
    CHECK(cluster_similarity(a, b) == doctest::Approx(0.0));
    CHECK(cluster_similarity(half, a) == doctest::Approx(0.6887).epsilon(1e-4));

    const std::vector<double> three{0.2, 0.3, 0.5}, negative{1.2, -0.2}, unnormalized{0.3, 0.3};
    CHECK(error_kind([&] { jensen_shannon_divergence(half, three); }) == ErrorKind::InvalidDistribution);
    CHECK(error_kind([&] { jensen_shannon_divergence(half, negative); }) == ErrorKind::InvalidDistribution);
    CHECK(error_kind([&] { jensen_shannon_divergence(unnormalized, half); }) == ErrorKind::InvalidDistribution);
}

TEST_CASE("jensen-shannon properties over random distributions") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 2 + rng() % 6;
        std::vector<double> p(k), q(k);
        for (auto& x : p) x = u(rng) < 0.2 ? 0.0 : u(rng);
        for (auto& x : q) x = u(rng);
        p[0] += 1e-3;
        const double sp = std::accumulate(p.begin(), p.end(), 0.0), sq = std::accumulate(q.begin(), q.end(), 0.0);
        for (auto& x : p) x /= sp;
        for (auto& x : q) x /= sq;
        const double d = jensen_shannon_divergence(p, q);
        CHECK(std::abs(d - jensen_shannon_divergence(q, p)) <= 1e-12);
        CHECK(jensen_shannon_divergence(p, p) == doctest::Approx(0.0));
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        CHECK(d == doctest::Approx(oracle::jsd(p, q)).epsilon(1e-9));

        double total = 0.0;
        for (std::size_t c = 0; c < k; ++c) total += edge_membership(p, q, c);
        CHECK(total <= 1.0 + 1e-12);
        double self = 0.0;
        for (std::size_t c = 0; c < k; ++c) self += edge_membership(p, p, c);
        CHECK(self == doctest::Approx(1.0));
    }
}

TEST_CASE("edge membership examples") {
    const std::vector<double> p{0.25, 0.75}, q{0.64, 0.36}, r{0.0, 1.0};
    CHECK(edge_membership(p, q, 0) == doctest::Approx(0.4));
    CHECK(edge_membership(p, p, 1) == doctest::Approx(0.75));
    CHECK(edge_membership(r, q, 0) == 0.0);
    CHECK(error_kind([&] { edge_membership(p, q, 2); }) == ErrorKind::InvalidClusterIndex);
}

namespace {

EmbeddingTable two_groups(std::size_t per_group) {
    EmbeddingTable t;
    const std::vector<double> up{0, 0, 1}, down{0, 0, -1};
    for (std::size_t i = 0; i < per_group; ++i) {
        t.insert("u" + std::to_string(i), up);
        t.insert("d" + std::to_string(i), down);
    }
    return t;
}

std::vector<std::string> ids_of(const EmbeddingTable& t) {
    std::vector<std::string> ids;
    for (const auto& [id, v] : t.vectors()) ids.push_back(id);
    return ids;
}

}  // namespace

TEST_CASE("antipodal groups get near one-hot memberships") {
    const EmbeddingTable t = two_groups(4);
    SoftClusterOptions opts;
    opts.num_clusters = 2;
    opts.temperature = 0.05;
    const MembershipMatrix m = soft_cluster(t, ids_of(t), opts);
    CHECK(m.num_clusters == 2);
    const auto& u = m.of("u0");
    const auto& d = m.of("d0");
    CHECK(std::max(u[0], u[1]) >= 0.99);
    CHECK(std::max(d[0], d[1]) >= 0.99);
    CHECK((u[0] > u[1]) != (d[0] > d[1]));
    for (const auto& [id, row] : m.membership) {
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
        for (double x : row) CHECK(x >= 0.0);
    }
    CHECK(error_kind([&] { m.of("nobody"); }) == ErrorKind::UnclusteredEvent);
}

TEST_CASE("identical vectors get identical memberships") {
    EmbeddingTable t;
    const std::vector<double> v{0.3, 0.4, 0.5};
    for (int i = 0; i < 5; ++i) t.insert("e" + std::to_string(i), v);
    SoftClusterOptions opts;
    const MembershipMatrix m = soft_cluster(t, ids_of(t), opts);
    for (const auto& [id, row] : m.membership) CHECK(row == m.of("e0"));
}

TEST_CASE("cluster count and membership preconditions") {
    const EmbeddingTable t = two_groups(2);
    const auto ids = ids_of(t);
    SoftClusterOptions opts;
    opts.num_clusters = ids.size() + 1;
    CHECK(error_kind([&] { soft_cluster(t, ids, opts); }) == ErrorKind::InvalidClusterCount);
    opts.num_clusters = 1;
    CHECK(error_kind([&] { soft_cluster(t, ids, opts); }) == ErrorKind::InvalidClusterCount);
    opts.num_clusters = 2;
    CHECK(error_kind([&] { soft_cluster(t, {"u0", "ghost"}, opts); }) == ErrorKind::UnembeddedEvent);
    opts.temperature = 0.0;
    CHECK(error_kind([&] { soft_cluster(t, ids, opts); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("soft clustering is deterministic for fixed inputs") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    EmbeddingTable t;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> v(6);
        for (auto& x : v) x = g(rng);
        t.insert("e" + std::to_string(i), v);
    }
    SoftClusterOptions opts;
    opts.num_clusters = 4;
    opts.seed = 9;
    CHECK(soft_cluster(t, ids_of(t), opts) == soft_cluster(t, ids_of(t), opts));
}

TEST_CASE("default cluster count") {
    CHECK(default_cluster_count(2) == 2);
    CHECK(default_cluster_count(8) == 2);
    CHECK(default_cluster_count(9) == 3);
    CHECK(default_cluster_count(168) == 10);
    CHECK(default_cluster_count(5000) == 12);
}
