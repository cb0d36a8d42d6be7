#include "atlas/mapgraph.hpp"
#include "../support/errors.hpp"
#include "../support/instances.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace atlas;
using fixture::error_kind;

namespace {

CandidateEdge edge(std::size_t u, std::size_t v, double strength, double coherence = -1) {
    CandidateEdge e;
    e.source = u;
    e.target = v;
    e.coherence = coherence < 0 ? strength : coherence;
    e.acceptance = 1.0;
    e.strength = strength;
    return e;
}

std::vector<std::string> names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(fixture::event_name(static_cast<int>(i)));
    return out;
}

// Events e0..e{n-1}, 100 s apart, so corpus ranks equal indices.
Corpus corpus_of(std::size_t n, std::vector<std::int64_t> times = {}, std::vector<std::int64_t> scores = {}) {
    std::vector<Submission> subs;
    for (std::size_t i = 0; i < n; ++i) {
        Submission s;
        s.id = fixture::event_name(static_cast<int>(i));
        s.community = "c";
        s.title = "event " + std::to_string(i);
        s.created_at = times.empty() ? static_cast<std::int64_t>(100 * i) : times[i];
        s.score = scores.empty() ? static_cast<std::int64_t>(i) : scores[i];
        s.upvote_ratio = 0.9;
        subs.push_back(s);
    }
    return Corpus("c", subs);
}

StrengthGraph graph(std::size_t n, std::vector<CandidateEdge> edges) {
    StrengthGraph g;
    g.event_ids = names(n);
    g.edges = std::move(edges);
    return g;
}

LpSolution fake_solution(std::vector<double> edge_values) {
    LpSolution s;
    s.status = LpStatus::Optimal;
    s.edges = std::move(edge_values);
    return s;
}

RoundingOptions rounding(double tau, double minscore) {
    RoundingOptions o;
    o.tau = tau;
    o.minscore = minscore;
    return o;
}

std::vector<std::pair<std::size_t, std::size_t>> pairs_of(const MapSkeleton& sk) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& e : sk.edges) out.emplace_back(e.source, e.target);
    return out;
}

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

}  // namespace

TEST_CASE("threshold keeps the heavy edges") {
    // Values 0.9, 0.6, 0.2 with tau 0.5: the 0.2 skip edge is nobody's best neighbour either.
    const StrengthGraph g = graph(3, {edge(0, 1, 0.5, 0.9), edge(0, 2, 0.5, 0.3), edge(1, 2, 0.5, 0.8)});
    const MapSkeleton sk = round_solution(fake_solution({0.9, 0.2, 0.6}), g, {0.5, 0.5, 0.5}, rounding(0.5, 0.0));
    CHECK(pairs_of(sk) == Pairs{{0, 1}, {1, 2}});
    CHECK(sk.edge_values == std::vector<double>{0.9, 0.6});
    CHECK(sk.events == std::vector<std::size_t>{0, 1, 2});

    // Raised to 0.5, the skip edge clears tau * max = 0.45.
    const MapSkeleton wide = round_solution(fake_solution({0.9, 0.5, 0.6}), g, {0.5, 0.5, 0.5}, rounding(0.5, 0.0));
    CHECK(pairs_of(wide) == Pairs{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("supported edges keep every event's most coherent neighbours") {
    // Tiny LP mass on 0->1->3 still survives; 0->2->3 carries the rest.
    const StrengthGraph g = graph(4, {edge(0, 1, 0.4, 0.9), edge(0, 2, 0.3, 0.5), edge(1, 3, 0.4, 0.9),
                                      edge(2, 3, 0.3, 0.5)});
    const MapSkeleton sk = round_solution(fake_solution({0.01, 1.0, 0.01, 1.0}), g, {0.5, 0.5, 0.5, 0.5},
                                          rounding(0.5, 0.0));
    CHECK(pairs_of(sk) == Pairs{{0, 1}, {0, 2}, {1, 3}, {2, 3}});

    // Zero values are not support.
    const MapSkeleton cut = round_solution(fake_solution({0.0, 1.0, 0.0, 1.0}), g, {0.5, 0.5, 0.5, 0.5},
                                           rounding(0.5, 0.0));
    CHECK(pairs_of(cut) == Pairs{{0, 2}, {2, 3}});
}

TEST_CASE("chain instance rounds to the two-edge chain") {
    oracle::Instance in;
    in.n = 3;
    in.edges = {{0, 1, 0.8}, {1, 2, 0.9}, {0, 2, 0.3}};
    in.percentiles = {0.5, 0.5, 0.5};
    in.K = 3;
    const LpModel model = fixture::model_of(in);
    const LpSolution sol = solve(model);
    const MapSkeleton sk = round_solution(sol, fixture::graph_of(in), in.percentiles, rounding(0.5, 0.0));
    CHECK(pairs_of(sk) == Pairs{{0, 1}, {1, 2}});
    double lo = 1.0;
    for (const auto& e : sk.edges) lo = std::min(lo, e.strength);
    CHECK(lo == doctest::Approx(0.8));
    CHECK(is_integral_feasible(sk, model));
}

TEST_CASE("acceptance repair") {
    SUBCASE("route events are protected and the shortfall is recorded") {
        const StrengthGraph g = graph(3, {edge(0, 1, 0.8), edge(1, 2, 0.9)});
        const MapSkeleton sk = round_solution(fake_solution({1, 1}), g, {0.9, 0.9, 0.5}, rounding(0.5, 0.85));
        CHECK(sk.events.size() == 3);
        CHECK(sk.acceptance_shortfall);
        CHECK(sk.removed_for_acceptance.empty());
        CHECK(sk.avg_score_percentile == doctest::Approx(2.3 / 3));
    }
    SUBCASE("an off-route low-percentile branch is removed") {
        const StrengthGraph g = graph(4, {edge(0, 1, 0.9), edge(0, 2, 0.5), edge(1, 3, 0.9), edge(2, 3, 0.5)});
        const MapSkeleton sk = round_solution(fake_solution({1, 1, 1, 1}), g, {0.9, 0.9, 0.1, 0.9},
                                              rounding(0.5, 0.85));
        CHECK(sk.events == std::vector<std::size_t>{0, 1, 3});
        CHECK(sk.removed_for_acceptance == std::vector<std::size_t>{2});
        CHECK_FALSE(sk.acceptance_shortfall);
        CHECK(sk.avg_score_percentile == doctest::Approx(0.9));
    }
}

TEST_CASE("rounding errors") {
    const StrengthGraph g = graph(3, {edge(0, 1, 0.8), edge(1, 2, 0.9)});
    CHECK(error_kind([&] { round_solution(fake_solution({0, 0}), g, {0.5, 0.5, 0.5}, rounding(0.5, 0)); }) ==
          ErrorKind::EmptyMap);
    CHECK(fixture::error_message([&] {
              round_solution(fake_solution({0, 0}), g, {0.5, 0.5, 0.5}, rounding(0.5, 0));
          }).find("empty map") != std::string::npos);
    // Support that never connects start and end.
    const StrengthGraph gap = graph(4, {edge(0, 1, 0.8), edge(2, 3, 0.9)});
    CHECK(error_kind([&] { round_solution(fake_solution({1, 1}), gap, {0.5, 0.5, 0.5, 0.5}, rounding(0.5, 0)); }) ==
          ErrorKind::EmptyMap);
    LpSolution infeasible;
    CHECK(error_kind([&] { round_solution(infeasible, g, {0.5, 0.5, 0.5}, rounding(0.5, 0)); }) == ErrorKind::Infeasible);
    CHECK(error_kind([&] { round_solution(fake_solution({1, 1}), g, {0.5, 0.5, 0.5}, rounding(1.5, 0)); }) ==
          ErrorKind::InvalidConfig);
}

TEST_CASE("main route examples") {
    // s, a, b, e in time order
    const std::vector<std::string> ids{"s", "a", "b", "e"};
    SUBCASE("bottleneck 0.6 beats 0.4") {
        const auto sk = make_skeleton(ids, {edge(0, 1, 0.9), edge(1, 3, 0.4), edge(0, 2, 0.6), edge(2, 3, 0.7)}, 0, 3);
        CHECK(main_route(sk) == std::vector<std::size_t>{0, 2, 3});
    }
    SUBCASE("equal bottlenecks: product 0.54 beats 0.42") {
        const auto sk = make_skeleton(ids, {edge(0, 1, 0.9), edge(1, 3, 0.6), edge(0, 2, 0.6), edge(2, 3, 0.7)}, 0, 3);
        CHECK(main_route(sk) == std::vector<std::size_t>{0, 1, 3});
    }
    SUBCASE("full ties go to the smaller id sequence") {
        const auto sk = make_skeleton({"s", "z", "m", "e"},
                                      {edge(0, 1, 0.5), edge(1, 3, 0.5), edge(0, 2, 0.5), edge(2, 3, 0.5)}, 0, 3);
        CHECK(main_route(sk) == std::vector<std::size_t>{0, 2, 3});
    }
    SUBCASE("max-product ignores the bottleneck") {
        const auto sk = make_skeleton(ids, {edge(0, 1, 0.9), edge(1, 3, 0.4), edge(0, 2, 0.6), edge(2, 3, 0.59)}, 0, 3);
        CHECK(main_route(sk, RouteCriterion::Bottleneck) == std::vector<std::size_t>{0, 2, 3});
        CHECK(main_route(sk, RouteCriterion::MaxProduct) == std::vector<std::size_t>{0, 1, 3});
    }
    SUBCASE("a chain is its own route") {
        const auto sk = make_skeleton(ids, {edge(0, 1, 0.2), edge(1, 2, 0.3), edge(2, 3, 0.4)}, 0, 3);
        CHECK(main_route(sk) == std::vector<std::size_t>{0, 1, 2, 3});
    }
    SUBCASE("disconnected") {
        const auto sk = make_skeleton(ids, {edge(0, 1, 0.9), edge(2, 3, 0.9)}, 0, 3);
        CHECK(error_kind([&] { main_route(sk); }) == ErrorKind::NoMainRoute);
    }
    CHECK(parse_route_criterion("max-product") == RouteCriterion::MaxProduct);
    CHECK(parse_route_criterion("bottleneck") == RouteCriterion::Bottleneck);
    CHECK_FALSE(parse_route_criterion("widest"));
}

TEST_CASE("main route matches brute force on small DAGs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 11);
        std::vector<oracle::Edge> edges;
        std::vector<CandidateEdge> candidates;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (coin(rng) < 0.35 || v == u + 1) {
                    // Coarse strengths make ties common.
                    const double s = 0.1 * static_cast<double>(1 + rng() % 9);
                    edges.push_back({u, v, s});
                    candidates.push_back(edge(static_cast<std::size_t>(u), static_cast<std::size_t>(v), s));
                }
        std::vector<std::string> ids;
        for (int i = 0; i < n; ++i) ids.push_back(std::string(1, static_cast<char>('a' + rng() % 26)) + std::to_string(i));
        const auto sk = make_skeleton(ids, candidates, 0, static_cast<std::size_t>(n - 1));
        for (bool bottleneck : {true, false}) {
            const auto want = oracle::best_route(n, edges, 0, n - 1, ids, bottleneck);
            REQUIRE(want);
            const auto got = main_route(sk, bottleneck ? RouteCriterion::Bottleneck : RouteCriterion::MaxProduct);
            CAPTURE(trial);
            CHECK(std::vector<int>(got.begin(), got.end()) == want->path);
            ++checked;
        }
    }
    CHECK(checked == 600);
}

TEST_CASE("storyline decomposition") {
    SUBCASE("diamond needs two storylines") {
        const auto sk = make_skeleton(names(4), {edge(0, 1, 0.9), edge(1, 3, 0.9), edge(0, 2, 0.5), edge(2, 3, 0.5)}, 0, 3);
        const auto route = main_route(sk);
        const auto cover = decompose_storylines(sk, route);
        CHECK(minimum_path_cover_size(sk) == 2);
        REQUIRE(cover.paths.size() == 2);
        CHECK(cover.paths[0] == route);
        CHECK(cover.paths[1] == std::vector<std::size_t>{2});
        CHECK_FALSE(cover.main_route_split);
    }
    SUBCASE("a chain is one storyline") {
        const auto sk = make_skeleton(names(3), {edge(0, 1, 0.9), edge(1, 2, 0.9)}, 0, 2);
        CHECK(decompose_storylines(sk, main_route(sk)).paths.size() == 1);
    }
    SUBCASE("a route that no minimum cover contains is split") {
        // s -> x -> m -> y -> e covers everything in one path; the strong route s, m, e cannot be extended.
        const auto sk = make_skeleton(names(5), {edge(0, 1, 0.3), edge(0, 2, 0.9), edge(1, 2, 0.3), edge(2, 3, 0.3),
                                                 edge(2, 4, 0.9), edge(3, 4, 0.3)},
                                      0, 4);
        const auto route = main_route(sk);
        CHECK(route == std::vector<std::size_t>{0, 2, 4});
        const auto cover = decompose_storylines(sk, route);
        CHECK(cover.main_route_split);
        REQUIRE(cover.paths.size() == 1);
        CHECK(cover.paths[0] == std::vector<std::size_t>{0, 1, 2, 3, 4});
    }
}

TEST_CASE("path covers match brute force") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 9);
        std::vector<CandidateEdge> candidates;
        std::vector<std::pair<int, int>> pairs;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (coin(rng) < 0.3) {
                    candidates.push_back(edge(static_cast<std::size_t>(u), static_cast<std::size_t>(v), 0.1 * (1 + rng() % 9)));
                    pairs.emplace_back(u, v);
                }
        // Ensure a route exists so main_route is defined.
        if (std::find(pairs.begin(), pairs.end(), std::make_pair(0, n - 1)) == pairs.end()) {
            candidates.push_back(edge(0, static_cast<std::size_t>(n - 1), 0.05));
            pairs.emplace_back(0, n - 1);
        }
        const auto sk = make_skeleton(names(static_cast<std::size_t>(n)), candidates, 0, static_cast<std::size_t>(n - 1));

        std::vector<int> local(static_cast<std::size_t>(n), -1);
        for (std::size_t p = 0; p < sk.events.size(); ++p) local[sk.events[p]] = static_cast<int>(p);
        std::vector<std::pair<int, int>> relabeled;
        for (auto [u, v] : pairs) relabeled.emplace_back(local[u], local[v]);
        std::sort(relabeled.begin(), relabeled.end());
        relabeled.erase(std::unique(relabeled.begin(), relabeled.end()), relabeled.end());
        const int want = oracle::min_path_cover(static_cast<int>(sk.events.size()), relabeled);
        CAPTURE(trial);
        CHECK(minimum_path_cover_size(sk) == static_cast<std::size_t>(want));

        const auto route = main_route(sk);
        const auto cover = decompose_storylines(sk, route);
        CHECK(cover.paths.size() == static_cast<std::size_t>(want));
        std::set<std::size_t> seen;
        std::set<std::pair<std::size_t, std::size_t>> edge_set;
        for (const auto& e : sk.edges) edge_set.insert({e.source, e.target});
        for (const auto& path : cover.paths) {
            for (std::size_t i = 0; i < path.size(); ++i) {
                CHECK(seen.insert(path[i]).second);
                if (i + 1 < path.size()) CHECK(edge_set.count({path[i], path[i + 1]}) == 1);
            }
        }
        CHECK(seen.size() == sk.events.size());
        if (!cover.main_route_split) CHECK(cover.paths[0] == route);
    }
}

TEST_CASE("representative landmarks") {
    SUBCASE("diamond: one landmark per branch") {
        // s(0) a(10) b(20) e(30); route s, a, e plus the lone b.
        const Corpus corpus = corpus_of(4, {0, 10, 20, 30});
        const auto sk = make_skeleton(names(4), {edge(0, 1, 0.9), edge(1, 3, 0.9), edge(0, 2, 0.5), edge(2, 3, 0.5)}, 0, 3);
        const auto cover = decompose_storylines(sk, main_route(sk));
        const auto marks = representative_landmarks(sk, cover.paths, corpus);
        // a and e are both 10 s from t* = 20; e has the higher score percentile.
        CHECK(marks == std::vector<std::size_t>{3, 2});
    }
    SUBCASE("a single storyline has none") {
        const Corpus corpus = corpus_of(3);
        const auto sk = make_skeleton(names(3), {edge(0, 1, 0.9), edge(1, 2, 0.9)}, 0, 2);
        CHECK(representative_landmarks(sk, {{0, 1, 2}}, corpus).empty());
    }
    SUBCASE("three storylines, two overlapping") {
        const Corpus corpus = corpus_of(6, {0, 5, 10, 15, 20, 30});
        const auto sk = make_skeleton(names(6), {}, 0, 5);
        const std::vector<std::vector<std::size_t>> lines{{0, 2}, {1, 3}, {4, 5}};
        const auto marks = representative_landmarks(sk, lines, corpus);
        // Width 2 first at t = 5: nearest are e2 (gap 5) vs e0 (gap 5) and e1 itself.
        REQUIRE(marks.size() == 2);
        CHECK(marks[0] == 2);
        CHECK(marks[1] == 1);
    }
    SUBCASE("landmark count equals the maximum overlap") {
        std::mt19937_64 rng(19);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 4 + rng() % 8;
            std::vector<std::int64_t> times;
            for (std::size_t i = 0; i < n; ++i) times.push_back(static_cast<std::int64_t>(10 * i));
            const Corpus corpus = corpus_of(n, times);
            std::vector<std::vector<std::size_t>> lines(2 + rng() % 3);
            for (std::size_t e = 0; e < n; ++e) lines[rng() % lines.size()].push_back(e);
            lines.erase(std::remove_if(lines.begin(), lines.end(), [](const auto& l) { return l.empty(); }), lines.end());
            if (lines.size() < 2) continue;
            std::vector<std::pair<std::int64_t, std::int64_t>> spans;
            for (const auto& l : lines) spans.emplace_back(times[l.front()], times[l.back()]);
            const auto sk = make_skeleton(names(n), {}, 0, n - 1);
            CHECK(representative_landmarks(sk, lines, corpus).size() ==
                  static_cast<std::size_t>(oracle::max_span_overlap(spans)));
        }
    }
}

TEST_CASE("coverage report") {
    MembershipMatrix m;
    m.num_clusters = 3;
    m.membership["e0"] = {0.25, 0.75, 0.0};
    m.membership["e1"] = {0.64, 0.0, 0.36};
    m.membership["e2"] = {0.64, 0.0, 0.36};
    SUBCASE("single edge") {
        const auto report = coverage_report(make_skeleton(names(3), {edge(0, 1, 0.5)}, 0, 1), m);
        REQUIRE(report.per_cluster.size() == 3);
        CHECK(report.per_cluster[0] == doctest::Approx(0.4));
        CHECK(report.per_cluster[1] == 0.0);  // empty cluster
        CHECK(report.per_cluster[2] == 0.0);
        CHECK(report.average == doctest::Approx(0.4 / 3));
    }
    SUBCASE("sums are capped at one") {
        const auto report =
            coverage_report(make_skeleton(names(3), {edge(0, 1, 0.5), edge(0, 2, 0.5), edge(1, 2, 0.5)}, 0, 2), m);
        CHECK(report.per_cluster[0] == 1.0);
        CHECK(report.per_cluster[2] == doctest::Approx(0.36));
    }
}

namespace {

struct Built {
    oracle::Instance instance;
    Corpus corpus;
    MembershipMatrix memberships;
    LpModel model;
    LpSolution solution;
    NarrativeMap map;
};

std::optional<Built> build_random(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    oracle::Instance in = fixture::random_instance(rng, 4 + static_cast<int>(rng() % 5), 0.0, 0.0);
    in.K = 2 + static_cast<int>(rng() % 2);
    Built b{in, corpus_of(static_cast<std::size_t>(in.n)), fixture::memberships_of(in), fixture::model_of(in), {}, {}};
    b.solution = solve(b.model);
    if (b.solution.status != LpStatus::Optimal) return std::nullopt;
    const MapSkeleton sk = round_solution(b.solution, fixture::graph_of(in), in.percentiles, rounding(0.5, 0.0));
    b.map = build_narrative_map(sk, MapContext{b.corpus, b.memberships, b.model, b.solution});
    b.map.params = {{"K", in.K}, {"seed", seed}};
    return b;
}

}  // namespace

TEST_CASE("assembled maps are consistent and round-trip through documents") {
    int feasible = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto built = build_random(seed);
        REQUIRE(built);
        const NarrativeMap& map = built->map;
        CAPTURE(seed);
        REQUIRE(!map.main_route.empty());
        CHECK(map.main_route.front() == "e0");
        CHECK(map.main_route.back() == fixture::event_name(built->instance.n - 1));
        CHECK(map.diagnostics.main_route_length == map.main_route.size());
        std::size_t route_edges = 0;
        for (const auto& e : map.edges) route_edges += e.on_main_route;
        CHECK(route_edges + 1 == map.main_route.size());
        std::size_t in_lines = 0;
        for (const auto& l : map.storylines) in_lines += l.events.size();
        CHECK(in_lines == map.nodes.size());
        for (const auto& n : map.nodes) CHECK(n.storyline < map.storylines.size());

        // The relaxation bounds an integral map's bottleneck only when that map is LP-feasible.
        if (map.diagnostics.integral_feasible) {
            ++feasible;
            CHECK(map.diagnostics.rounded_min_strength <= map.diagnostics.lp_objective + 1e-9);
        }

        const auto doc = to_document(map);
        CHECK(doc["schema_version"] == 1);
        CHECK(map_from_document(doc) == map);
        CHECK(map_from_document(nlohmann::ordered_json::parse(to_document_text(map))) == map);
    }
    CHECK(feasible > 0);
}

TEST_CASE("documents and DOT are byte-stable") {
    const auto a = build_random(5), b = build_random(5);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(to_document_text(a->map) == to_document_text(b->map));
    CHECK(to_dot(a->map) == to_dot(b->map));
    const std::string text = to_document_text(a->map);
    CHECK(text.back() == '\n');
    CHECK(text.find("\"schema_version\": 1") < text.find("\"params\""));
}

TEST_CASE("DOT marks the main route and landmarks") {
    const Corpus corpus = corpus_of(4, {0, 10, 20, 30});
    MembershipMatrix m;
    m.num_clusters = 2;
    for (const auto& id : names(4)) m.membership[id] = {0.5, 0.5};
    oracle::Instance in;
    in.n = 4;
    in.percentiles = {0.5, 0.5, 0.5, 0.5};
    in.edges = {{0, 1, 0.9}, {0, 2, 0.5}, {1, 3, 0.9}, {2, 3, 0.5}};
    const LpModel model = fixture::model_of(in);
    const LpSolution sol = solve(model);
    const auto sk = make_skeleton(names(4), {edge(0, 1, 0.9), edge(1, 3, 0.9), edge(0, 2, 0.5), edge(2, 3, 0.5)}, 0, 3);
    const NarrativeMap map = build_narrative_map(sk, MapContext{corpus, m, model, sol});
    CHECK(map.main_route == std::vector<std::string>{"e0", "e1", "e3"});
    CHECK(map.landmarks.size() == 2);
    const std::string dot = to_dot(map);
    std::size_t dashed = 0, doubled = 0;
    for (std::size_t p = 0; (p = dot.find("style=dashed, color=blue", p)) != std::string::npos; ++p) ++dashed;
    for (std::size_t p = 0; (p = dot.find("peripheries=2", p)) != std::string::npos; ++p) ++doubled;
    CHECK(dashed == 2);
    CHECK(doubled == 2);
    CHECK(dot.rfind("digraph narrative_map {", 0) == 0);
    CHECK(dot.find("\"e0\" -> \"e1\"") != std::string::npos);
    CHECK(!map.storylines[1].mean_strength);  // the lone e2

    Corpus other = corpus_of(3);
    CHECK(error_kind([&] { build_narrative_map(sk, MapContext{other, m, model, sol}); }) == ErrorKind::ForeignMap);
    CHECK(error_kind([&] { map_from_document(nlohmann::ordered_json{{"schema_version", 2}}); }) ==
          ErrorKind::InvalidConfig);
}
