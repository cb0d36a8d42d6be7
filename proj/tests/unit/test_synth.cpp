#include "atlas/synth.hpp"
#include "../support/errors.hpp"

#include <doctest.h>

using namespace atlas;
using fixture::error_kind;

namespace {

PlantedSpec two_chains(std::uint64_t seed) {
    PlantedSpec spec;
    spec.chain_lengths = {6, 9};
    spec.profiles = {AcceptanceProfile::Accepted, AcceptanceProfile::Rejected};
    spec.seed = seed;
    return spec;
}

// A map over the chain's events with the given consecutive edges and storylines.
NarrativeMap map_over(const std::vector<std::string>& chain, const std::vector<std::vector<std::string>>& lines) {
    NarrativeMap map;
    for (const auto& id : chain) map.nodes.push_back({id, id, 0, 0, 0.9, 0.5, 0, false, false});
    for (std::size_t l = 0; l < lines.size(); ++l) {
        map.storylines.push_back({l, lines[l], std::nullopt, 0.0});
        for (std::size_t i = 0; i + 1 < lines[l].size(); ++i)
            map.edges.push_back({lines[l][i], lines[l][i + 1], 1, 1, 1, 1, l == 0});
    }
    map.main_route = lines.empty() ? std::vector<std::string>{} : lines[0];
    return map;
}

}  // namespace

TEST_CASE("planted corpora follow the spec") {
    const PlantedCorpus pc = generate_planted_corpus(two_chains(3));
    CHECK(pc.corpus.size() == 15);
    REQUIRE(pc.planted.size() == 2);
    CHECK(pc.planted[0].size() == 6);
    CHECK(pc.planted[1].size() == 9);
    CHECK(pc.embeddings.size() == 15);
    CHECK(pc.embeddings.dim() == 32);

    const auto& subs = pc.corpus.submissions();
    CHECK(pc.chain_of(subs.front().id) == 0u);
    CHECK(pc.chain_of(subs.back().id) == 0u);
    CHECK(pc.planted[0].front() == subs.front().id);
    CHECK(pc.planted[0].back() == subs.back().id);
    CHECK_FALSE(pc.chain_of("nope"));

    for (std::size_t c = 0; c < 2; ++c) {
        std::int64_t prev = -1;
        for (const auto& id : pc.planted[c]) {
            const auto& s = pc.corpus.at(pc.corpus.rank_of(id));
            CHECK(s.created_at >= prev);
            prev = s.created_at;
            CHECK(s.created_at >= 1625616000);
            CHECK(s.created_at <= 1625616000 + 11 * 86400);
            if (c == 0) {
                CHECK(s.score >= 500);
                CHECK(s.upvote_ratio >= 0.85);
            } else {
                CHECK(s.score <= 40);
                CHECK(s.upvote_ratio <= 0.5);
                CHECK(s.upvote_ratio >= 0.2);
            }
        }
    }
}

TEST_CASE("chain neighbours are closer than other chains") {
    const PlantedCorpus pc = generate_planted_corpus(two_chains(8));
    double within = 1.0, across = 0.0;
    for (std::size_t i = 0; i + 1 < pc.planted[1].size(); ++i)
        within = std::min(within, angular_similarity(pc.embeddings.at(pc.planted[1][i]), pc.embeddings.at(pc.planted[1][i + 1])));
    for (const auto& a : pc.planted[0])
        for (const auto& b : pc.planted[1]) across = std::max(across, angular_similarity(pc.embeddings.at(a), pc.embeddings.at(b)));
    CHECK(within > across);
}

TEST_CASE("zero noise puts a chain on one direction") {
    PlantedSpec spec;
    spec.chain_lengths = {8};
    spec.profiles = {AcceptanceProfile::Neutral};
    spec.noise_sigma = 0.0;
    const PlantedCorpus pc = generate_planted_corpus(spec);
    for (const auto& id : pc.planted[0]) CHECK(angular_similarity(pc.embeddings.at(id), pc.embeddings.at(pc.planted[0][0])) == doctest::Approx(1.0));
}

TEST_CASE("generation is deterministic per seed") {
    const PlantedCorpus a = generate_planted_corpus(two_chains(11));
    const PlantedCorpus b = generate_planted_corpus(two_chains(11));
    const PlantedCorpus c = generate_planted_corpus(two_chains(12));
    CHECK(a.corpus.submissions() == b.corpus.submissions());
    CHECK(a.embeddings.vectors() == b.embeddings.vectors());
    CHECK(a.planted == b.planted);
    CHECK(a.embeddings.vectors() != c.embeddings.vectors());
}

TEST_CASE("invalid profiles") {
    PlantedSpec spec;
    spec.chain_lengths = {1};
    spec.profiles = {AcceptanceProfile::Accepted};
    CHECK(error_kind([&] { generate_planted_corpus(spec); }) == ErrorKind::InvalidProfile);
    spec.chain_lengths = {};
    CHECK(error_kind([&] { generate_planted_corpus(spec); }) == ErrorKind::InvalidProfile);
    spec.chain_lengths = {3, 3, 3};
    spec.profiles = {AcceptanceProfile::Accepted, AcceptanceProfile::Rejected};
    CHECK(error_kind([&] { generate_planted_corpus(spec); }) == ErrorKind::InvalidProfile);
    spec.profiles = {AcceptanceProfile::Accepted};
    spec.noise_sigma = -1;
    CHECK(error_kind([&] { generate_planted_corpus(spec); }) == ErrorKind::InvalidProfile);
    CHECK(error_kind([] { parse_acceptance_profile("popular"); }) == ErrorKind::InvalidProfile);
    CHECK(parse_acceptance_profile("rejected") == AcceptanceProfile::Rejected);
    CHECK(std::string(to_string(AcceptanceProfile::Accepted)) == "accepted");
}

TEST_CASE("recovery metrics") {
    PlantedSpec spec;
    spec.chain_lengths = {8};
    spec.profiles = {AcceptanceProfile::Accepted};
    spec.seed = 2;
    const PlantedCorpus pc = generate_planted_corpus(spec);
    const auto& chain = pc.planted[0];

    SUBCASE("perfect recovery") {
        const auto m = evaluate_recovery(map_over(chain, {chain}), pc);
        CHECK(m.adjacency_recall == 1.0);
        CHECK(m.adjacency_precision == 1.0);
        CHECK(m.main_route_purity == 1.0);
        CHECK(m.landmark_hit_rate == 1.0);
        CHECK(m.majority_chain == 0u);
    }
    SUBCASE("one planted adjacency missing") {
        const std::vector<std::string> left(chain.begin(), chain.begin() + 4), right(chain.begin() + 4, chain.end());
        const auto m = evaluate_recovery(map_over(chain, {left, right}), pc);
        CHECK(m.adjacency_recall == doctest::Approx(6.0 / 7.0));
        CHECK(m.adjacency_recall == doctest::Approx(0.857).epsilon(1e-3));
        CHECK(m.adjacency_precision == 1.0);
    }
    SUBCASE("a skipped event still counts within two steps") {
        std::vector<std::string> skip = chain;
        skip.erase(skip.begin() + 3);
        NarrativeMap map = map_over(chain, {skip, {chain[3]}});
        const auto m = evaluate_recovery(map, pc);
        // (c2, c3) and (c3, c4) are lost; the c2 -> c4 edge is two apart and counts as precise.
        CHECK(m.adjacency_recall == doctest::Approx(5.0 / 7.0));
        CHECK(m.adjacency_precision == 1.0);
    }
    SUBCASE("empty map") {
        const auto m = evaluate_recovery(NarrativeMap{}, pc);
        CHECK(m.adjacency_recall == 0.0);
        CHECK(m.main_route_purity == 0.0);
        CHECK_FALSE(m.majority_chain);
    }
    SUBCASE("foreign ids") {
        NarrativeMap map = map_over(chain, {chain});
        map.nodes.push_back({"ghost", "", 0, 0, 0, 0, 0, false, false});
        CHECK(error_kind([&] { evaluate_recovery(map, pc); }) == ErrorKind::ForeignMap);
    }
}
