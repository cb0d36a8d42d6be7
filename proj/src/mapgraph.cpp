#include "atlas/mapgraph.hpp"

#include "atlas/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace atlas {

const char* to_string(RouteCriterion c) {
    switch (c) {
        case RouteCriterion::Bottleneck: return "bottleneck";
        case RouteCriterion::MaxProduct: return "max-product";
    }
    return "unknown";
}

std::optional<RouteCriterion> parse_route_criterion(const std::string& text) {
    if (text == "bottleneck") return RouteCriterion::Bottleneck;
    if (text == "max-product") return RouteCriterion::MaxProduct;
    return std::nullopt;
}

bool MapSkeleton::contains(std::size_t event) const {
    return std::binary_search(events.begin(), events.end(), event);
}

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Adjacency over the kept events of a skeleton. Local positions follow event
// index order, which is a topological order because edges point forward.
struct LocalGraph {
    std::vector<std::size_t> local;                                 // event index -> position or npos
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;  // (target position, edge index)
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> in;

    explicit LocalGraph(const MapSkeleton& sk) {
        local.assign(sk.event_ids.size(), npos);
        for (std::size_t p = 0; p < sk.events.size(); ++p) local[sk.events[p]] = p;
        out.resize(sk.events.size());
        in.resize(sk.events.size());
        for (std::size_t e = 0; e < sk.edges.size(); ++e) {
            const std::size_t u = local[sk.edges[e].source], v = local[sk.edges[e].target];
            if (u == npos || v == npos) continue;
            out[u].emplace_back(v, e);
            in[v].emplace_back(u, e);
        }
        for (auto& list : out) std::sort(list.begin(), list.end());
        for (auto& list : in) std::sort(list.begin(), list.end());
    }
};

double mean_percentile(const MapSkeleton& sk, const std::vector<double>& percentiles) {
    if (sk.events.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t e : sk.events) sum += percentiles[e];
    return sum / static_cast<double>(sk.events.size());
}

// Restricts `candidates` to events and edges that lie on some start-to-end
// path, skipping events in `removed`.
void prune(MapSkeleton& sk, const std::vector<CandidateEdge>& edges, const std::vector<double>& values,
           const std::vector<char>& removed) {
    const std::size_t n = sk.event_ids.size();
    std::vector<std::vector<std::size_t>> out(n), in(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (removed[edges[e].source] || removed[edges[e].target]) continue;
        out[edges[e].source].push_back(edges[e].target);
        in[edges[e].target].push_back(edges[e].source);
    }
    std::vector<char> fwd(n, 0), bwd(n, 0);
    fwd[sk.start] = 1;
    for (std::size_t u = 0; u < n; ++u)
        if (fwd[u])
            for (std::size_t v : out[u]) fwd[v] = 1;
    bwd[sk.end] = 1;
    for (std::size_t u = n; u-- > 0;)
        if (bwd[u])
            for (std::size_t v : in[u]) bwd[v] = 1;
    if (!fwd[sk.end])
        throw Error(ErrorKind::EmptyMap, "empty map: no start-to-end route survives rounding; try a lower tau");

    sk.events.clear();
    for (std::size_t u = 0; u < n; ++u)
        if (fwd[u] && bwd[u]) sk.events.push_back(u);
    sk.edges.clear();
    sk.edge_values.clear();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& edge = edges[e];
        if (removed[edge.source] || removed[edge.target]) continue;
        if (fwd[edge.source] && bwd[edge.target]) {
            sk.edges.push_back(edge);
            sk.edge_values.push_back(values[e]);
        }
    }
}

}  // namespace

MapSkeleton round_solution(const LpSolution& solution, const StrengthGraph& graph,
                           const std::vector<double>& percentiles, const RoundingOptions& options) {
    if (solution.status != LpStatus::Optimal)
        throw Error(ErrorKind::Infeasible, std::string("cannot round a ") + to_string(solution.status) + " solution");
    if (!(options.tau >= 0.0 && options.tau <= 1.0))
        throw Error(ErrorKind::InvalidConfig, "tau out of range");
    if (solution.edges.size() != graph.edges.size() || percentiles.size() != graph.num_events())
        throw Error(ErrorKind::SolverInconsistency, "solver inconsistency: solution does not match the strength graph");
    if (graph.num_events() < 2) throw Error(ErrorKind::InsufficientEvents, "insufficient events");

    MapSkeleton sk;
    sk.event_ids = graph.event_ids;
    sk.start = 0;
    sk.end = graph.num_events() - 1;

    // The relaxation spreads edge mass thinly, so a plain threshold tends to
    // disconnect the map. The LP decides which edges are in play; coherence
    // picks each event's neighbours among them.
    constexpr double kSupport = 1e-9;
    const std::size_t n = graph.num_events();
    double top = 0.0;
    for (double v : solution.edges) top = std::max(top, v);
    const double threshold = std::max(options.tau * top, kSupport);
    std::vector<std::size_t> best_in(n, npos), best_out(n, npos);
    auto heavier = [&](std::size_t a, std::size_t b) {
        if (b == npos) return true;
        if (graph.edges[a].coherence != graph.edges[b].coherence) return graph.edges[a].coherence > graph.edges[b].coherence;
        return graph.edges[a].strength > graph.edges[b].strength;
    };
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (solution.edges[e] <= kSupport) continue;
        const auto& edge = graph.edges[e];
        if (heavier(e, best_out[edge.source])) best_out[edge.source] = e;
        if (heavier(e, best_in[edge.target])) best_in[edge.target] = e;
    }
    std::vector<char> keep(graph.edges.size(), 0);
    for (std::size_t u = 0; u < n; ++u) {
        if (best_in[u] != npos) keep[best_in[u]] = 1;
        if (best_out[u] != npos) keep[best_out[u]] = 1;
    }
    std::vector<CandidateEdge> kept;
    std::vector<double> values;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (keep[e] || solution.edges[e] >= threshold) {
            kept.push_back(graph.edges[e]);
            values.push_back(solution.edges[e]);
        }
    }
    if (kept.empty()) throw Error(ErrorKind::EmptyMap, "empty map: the LP solution selects no edge");

    std::vector<char> removed(graph.num_events(), 0);
    prune(sk, kept, values, removed);

    sk.avg_score_percentile = mean_percentile(sk, percentiles);
    while (sk.avg_score_percentile < options.minscore) {
        const auto route = main_route(sk, options.criterion);
        std::vector<char> on_route(graph.num_events(), 0);
        for (std::size_t e : route) on_route[e] = 1;
        std::size_t victim = npos;
        for (std::size_t e : sk.events) {
            if (on_route[e]) continue;
            if (victim == npos || percentiles[e] < percentiles[victim]) victim = e;
        }
        if (victim == npos) {
            sk.acceptance_shortfall = true;
            break;
        }
        removed[victim] = 1;
        sk.removed_for_acceptance.push_back(victim);
        prune(sk, kept, values, removed);
        sk.avg_score_percentile = mean_percentile(sk, percentiles);
    }
    return sk;
}

MapSkeleton make_skeleton(std::vector<std::string> event_ids, std::vector<CandidateEdge> edges, std::size_t start,
                          std::size_t end) {
    MapSkeleton sk;
    sk.event_ids = std::move(event_ids);
    sk.start = start;
    sk.end = end;
    std::sort(edges.begin(), edges.end(), [](const CandidateEdge& a, const CandidateEdge& b) {
        return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
    std::vector<char> used(sk.event_ids.size(), 0);
    used[start] = used[end] = 1;
    for (const auto& e : edges) {
        if (e.source >= e.target || e.target >= sk.event_ids.size())
            throw Error(ErrorKind::InvalidConfig, "skeleton edges must point forward in time");
        used[e.source] = used[e.target] = 1;
    }
    for (std::size_t u = 0; u < used.size(); ++u)
        if (used[u]) sk.events.push_back(u);
    sk.edge_values.assign(edges.size(), 1.0);
    sk.edges = std::move(edges);
    return sk;
}

std::vector<std::size_t> main_route(const MapSkeleton& sk, RouteCriterion criterion) {
    const LocalGraph g(sk);
    const std::size_t n = sk.events.size();
    if (sk.start >= g.local.size() || sk.end >= g.local.size() || g.local[sk.start] == npos ||
        g.local[sk.end] == npos)
        throw Error(ErrorKind::NoMainRoute, "no main route: start or end event missing from the map");
    const std::size_t s = g.local[sk.start], t = g.local[sk.end];

    // Best achievable bottleneck from start to every node.
    std::vector<double> bottleneck(n, kNegInf);
    bottleneck[s] = std::numeric_limits<double>::infinity();
    for (std::size_t u = s; u < n; ++u) {
        if (bottleneck[u] == kNegInf) continue;
        for (const auto& [v, e] : g.out[u]) bottleneck[v] = std::max(bottleneck[v], std::min(bottleneck[u], sk.edges[e].strength));
    }
    if (bottleneck[t] == kNegInf) throw Error(ErrorKind::NoMainRoute, "no main route: start and end are disconnected");
    const double floor = criterion == RouteCriterion::Bottleneck ? bottleneck[t] : kNegInf;

    // Best log-product to end over edges that keep the bottleneck optimal.
    std::vector<char> reach(n, 0);
    std::vector<double> value(n, kNegInf);
    reach[t] = 1;
    value[t] = 0.0;
    for (std::size_t u = t; u-- > 0;) {
        for (const auto& [v, e] : g.out[u]) {
            const double w = sk.edges[e].strength;
            if (!reach[v] || w < floor) continue;
            reach[u] = 1;
            value[u] = std::max(value[u], std::log(w) + value[v]);
        }
    }
    if (!reach[s]) throw Error(ErrorKind::NoMainRoute, "no main route: start and end are disconnected");

    auto same = [](double a, double b) {
        if (a == b) return true;
        return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
    };
    std::vector<std::size_t> route{sk.start};
    for (std::size_t u = s; u != t;) {
        std::size_t next = npos;
        for (const auto& [v, e] : g.out[u]) {
            const double w = sk.edges[e].strength;
            if (!reach[v] || w < floor) continue;
            if (!same(std::log(w) + value[v], value[u])) continue;
            if (next == npos || sk.event_ids[sk.events[v]] < sk.event_ids[sk.events[next]]) next = v;
        }
        route.push_back(sk.events[next]);
        u = next;
    }
    return route;
}

namespace {

// Kuhn's augmenting paths; left and right vertices are local positions.
// `blocked` vertices take part on neither side.
struct Matching {
    std::vector<std::size_t> right_of;  // left u -> right v
    std::vector<std::size_t> left_of;   // right v -> left u
    std::size_t size = 0;
};

bool augment(std::size_t u, const LocalGraph& g, const std::vector<char>& blocked, std::vector<char>& seen,
             Matching& m) {
    for (const auto& [v, e] : g.out[u]) {
        (void)e;
        if (blocked[v] || seen[v]) continue;
        seen[v] = 1;
        if (m.left_of[v] == npos || augment(m.left_of[v], g, blocked, seen, m)) {
            m.left_of[v] = u;
            m.right_of[u] = v;
            return true;
        }
    }
    return false;
}

Matching max_matching(const LocalGraph& g, const std::vector<char>& blocked) {
    const std::size_t n = g.out.size();
    Matching m;
    m.right_of.assign(n, npos);
    m.left_of.assign(n, npos);
    std::vector<char> seen(n);
    for (std::size_t u = 0; u < n; ++u) {
        if (blocked[u]) continue;
        std::fill(seen.begin(), seen.end(), 0);
        if (augment(u, g, blocked, seen, m)) ++m.size;
    }
    return m;
}

std::vector<std::vector<std::size_t>> paths_from(const MapSkeleton& sk, const Matching& m,
                                                 const std::vector<char>& blocked) {
    std::vector<std::vector<std::size_t>> paths;
    for (std::size_t u = 0; u < m.right_of.size(); ++u) {
        if (blocked[u] || m.left_of[u] != npos) continue;
        std::vector<std::size_t> path;
        for (std::size_t v = u; v != npos; v = m.right_of[v]) path.push_back(sk.events[v]);
        paths.push_back(std::move(path));
    }
    return paths;  // ascending by first event already
}

}  // namespace

StorylineCover decompose_storylines(const MapSkeleton& sk, const std::vector<std::size_t>& route) {
    const LocalGraph g(sk);
    const std::size_t n = sk.events.size();
    std::vector<char> none(n, 0);
    const Matching free_match = max_matching(g, none);
    const std::size_t minimum = n - free_match.size;

    bool route_valid = !route.empty();
    std::vector<char> on_route(n, 0);
    for (std::size_t i = 0; route_valid && i < route.size(); ++i) {
        if (route[i] >= g.local.size() || g.local[route[i]] == npos) {
            route_valid = false;
            break;
        }
        on_route[g.local[route[i]]] = 1;
        if (i + 1 < route.size()) {
            const auto& succ = g.out[g.local[route[i]]];
            const std::size_t v = route[i + 1] < g.local.size() ? g.local[route[i + 1]] : npos;
            route_valid = std::any_of(succ.begin(), succ.end(), [v](const auto& p) { return p.first == v; });
        }
    }

    StorylineCover cover;
    if (route_valid) {
        const Matching rest = max_matching(g, on_route);
        const std::size_t seeded = 1 + (n - route.size()) - rest.size;
        if (seeded == minimum) {
            cover.paths.push_back(route);
            for (auto& p : paths_from(sk, rest, on_route)) cover.paths.push_back(std::move(p));
            return cover;
        }
    }
    cover.paths = paths_from(sk, free_match, none);
    cover.main_route_split = !route.empty();
    return cover;
}

std::size_t minimum_path_cover_size(const MapSkeleton& sk) {
    const LocalGraph g(sk);
    std::vector<char> none(sk.events.size(), 0);
    return sk.events.size() - max_matching(g, none).size;
}

std::vector<std::size_t> representative_landmarks(const MapSkeleton& sk,
                                                  const std::vector<std::vector<std::size_t>>& storylines,
                                                  const Corpus& corpus) {
    (void)sk;
    std::vector<std::size_t> landmarks;
    if (storylines.size() < 2) return landmarks;

    auto time_of = [&](std::size_t e) { return corpus.at(e).created_at; };
    std::vector<std::pair<std::int64_t, std::int64_t>> spans;
    for (const auto& line : storylines) spans.emplace_back(time_of(line.front()), time_of(line.back()));

    // Width only rises at a span start, so the earliest argmax is one of them.
    std::size_t best_width = 0;
    std::int64_t best_time = 0;
    for (const auto& [first, last] : spans) {
        (void)last;
        std::size_t width = 0;
        for (const auto& [a, b] : spans)
            if (a <= first && first <= b) ++width;
        if (width > best_width || (width == best_width && first < best_time)) {
            best_width = width;
            best_time = first;
        }
    }

    for (std::size_t l = 0; l < storylines.size(); ++l) {
        if (!(spans[l].first <= best_time && best_time <= spans[l].second)) continue;
        std::size_t pick = npos;
        std::int64_t pick_gap = 0;
        double pick_acc = 0.0;
        for (std::size_t e : storylines[l]) {
            const auto& sub = corpus.at(e);
            const std::int64_t gap = sub.created_at > best_time ? sub.created_at - best_time : best_time - sub.created_at;
            const double acc = corpus.percentile(e) * sub.upvote_ratio;
            const bool better = pick == npos || gap < pick_gap ||
                                (gap == pick_gap && (acc > pick_acc || (acc == pick_acc && sub.id < corpus.at(pick).id)));
            if (better) {
                pick = e;
                pick_gap = gap;
                pick_acc = acc;
            }
        }
        landmarks.push_back(pick);
    }
    return landmarks;
}

CoverageReport coverage_report(const MapSkeleton& sk, const MembershipMatrix& memberships) {
    CoverageReport report;
    report.per_cluster.assign(memberships.num_clusters, 0.0);
    for (const auto& e : sk.edges) {
        const auto& p = memberships.of(sk.event_ids[e.source]);
        const auto& q = memberships.of(sk.event_ids[e.target]);
        for (std::size_t k = 0; k < memberships.num_clusters; ++k) report.per_cluster[k] += edge_membership(p, q, k);
    }
    double sum = 0.0;
    for (double& c : report.per_cluster) {
        c = std::min(1.0, c);
        sum += c;
    }
    if (!report.per_cluster.empty()) report.average = sum / static_cast<double>(report.per_cluster.size());
    return report;
}

bool is_integral_feasible(const MapSkeleton& sk, const LpModel& model, double tolerance) {
    if (sk.event_ids.size() != model.num_events) return false;
    LpSolution point;
    point.status = LpStatus::Optimal;
    point.events.assign(model.num_events, 0.0);
    point.edges.assign(model.edges.size(), 0.0);
    point.clusters.assign(model.num_clusters, 0.0);
    for (std::size_t e : sk.events) point.events[e] = 1.0;

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
    for (std::size_t e = 0; e < model.edges.size(); ++e) index[{model.edges[e].source, model.edges[e].target}] = e;
    double minedge = 1.0;
    for (const auto& edge : sk.edges) {
        const auto it = index.find({edge.source, edge.target});
        if (it == index.end()) return false;
        point.edges[it->second] = 1.0;
        minedge = std::min(minedge, model.edges[it->second].strength);
        for (std::size_t k = 0; k < model.num_clusters; ++k)
            point.clusters[k] += model.edge_cluster_weight[it->second][k];
    }
    for (double& c : point.clusters) c = std::min(1.0, c);
    point.minedge = point.objective = minedge;
    return evaluate_constraints(model, point).max_violation <= tolerance;
}

NarrativeMap build_narrative_map(const MapSkeleton& sk, const MapContext& ctx) {
    const Corpus& corpus = ctx.corpus;
    for (std::size_t e : sk.events)
        if (e >= corpus.size() || corpus.at(e).id != sk.event_ids[e])
            throw Error(ErrorKind::ForeignMap, "foreign map: skeleton events do not match the corpus");

    const auto route = main_route(sk, ctx.criterion);
    const auto cover = decompose_storylines(sk, route);
    const auto landmark_events = representative_landmarks(sk, cover.paths, corpus);
    const auto coverage = coverage_report(sk, ctx.memberships);

    std::map<std::size_t, std::size_t> storyline_of;
    for (std::size_t l = 0; l < cover.paths.size(); ++l)
        for (std::size_t e : cover.paths[l]) storyline_of[e] = l;
    std::vector<char> on_route(sk.event_ids.size(), 0), is_landmark(sk.event_ids.size(), 0);
    for (std::size_t e : route) on_route[e] = 1;
    for (std::size_t e : landmark_events) is_landmark[e] = 1;
    std::map<std::pair<std::size_t, std::size_t>, const CandidateEdge*> edge_at;
    for (const auto& e : sk.edges) edge_at[{e.source, e.target}] = &e;
    std::map<std::pair<std::size_t, std::size_t>, char> route_pairs;
    for (std::size_t i = 0; i + 1 < route.size(); ++i) route_pairs[{route[i], route[i + 1]}] = 1;

    NarrativeMap map;
    for (std::size_t e : sk.events) {
        const auto& sub = corpus.at(e);
        MapNode node;
        node.id = sub.id;
        node.title = sub.title;
        node.created_at = sub.created_at;
        node.score = sub.score;
        node.upvote_ratio = sub.upvote_ratio;
        node.score_percentile = corpus.percentile(e);
        node.storyline = storyline_of.at(e);
        node.landmark = is_landmark[e];
        node.on_main_route = on_route[e];
        map.nodes.push_back(std::move(node));
    }
    double min_strength = 1.0;
    for (std::size_t i = 0; i < sk.edges.size(); ++i) {
        const auto& e = sk.edges[i];
        MapEdge edge;
        edge.source = sk.event_ids[e.source];
        edge.target = sk.event_ids[e.target];
        edge.coherence = e.coherence;
        edge.acceptance = e.acceptance;
        edge.strength = e.strength;
        edge.lp_value = sk.edge_values.at(i);
        edge.on_main_route = route_pairs.count({e.source, e.target}) != 0;
        min_strength = std::min(min_strength, e.strength);
        map.edges.push_back(std::move(edge));
    }
    for (std::size_t e : route) map.main_route.push_back(sk.event_ids[e]);
    for (std::size_t l = 0; l < cover.paths.size(); ++l) {
        const auto& path = cover.paths[l];
        Storyline line;
        line.id = l;
        double acc = 0.0;
        for (std::size_t e : path) {
            line.events.push_back(sk.event_ids[e]);
            acc += std::sqrt(corpus.percentile(e) * corpus.at(e).upvote_ratio);
        }
        line.mean_acceptance = acc / static_cast<double>(path.size());
        if (path.size() > 1) {
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < path.size(); ++i) s += edge_at.at({path[i], path[i + 1]})->strength;
            line.mean_strength = s / static_cast<double>(path.size() - 1);
        }
        map.storylines.push_back(std::move(line));
    }
    for (std::size_t e : landmark_events) map.landmarks.push_back(sk.event_ids[e]);

    auto& d = map.diagnostics;
    d.avg_score_percentile = sk.avg_score_percentile;
    d.minscore = ctx.model.params.minscore;
    d.acceptance_shortfall = sk.acceptance_shortfall;
    for (std::size_t e : sk.removed_for_acceptance) d.removed_for_acceptance.push_back(sk.event_ids[e]);
    d.cluster_coverage = coverage.per_cluster;
    d.average_coverage = coverage.average;
    d.mincover = ctx.model.params.mincover;
    d.lp_objective = ctx.solution.objective;
    d.rounded_min_strength = sk.edges.empty() ? 0.0 : min_strength;
    d.main_route_length = route.size();
    d.main_route_split = cover.main_route_split;
    d.integral_feasible = is_integral_feasible(sk, ctx.model);
    return map;
}

namespace {

using ojson = nlohmann::ordered_json;

template <class T>
T field(const ojson& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorKind::InvalidConfig, std::string("map document is missing \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::InvalidConfig, std::string("map document field \"") + key + "\" has the wrong type");
    }
}

}  // namespace

ojson to_document(const NarrativeMap& map) {
    ojson doc;
    doc["schema_version"] = 1;
    doc["params"] = map.params;

    const auto& d = map.diagnostics;
    ojson diag;
    diag["avg_score_percentile"] = d.avg_score_percentile;
    diag["minscore"] = d.minscore;
    diag["acceptance_shortfall"] = d.acceptance_shortfall;
    diag["removed_for_acceptance"] = d.removed_for_acceptance;
    diag["cluster_coverage"] = d.cluster_coverage;
    diag["average_coverage"] = d.average_coverage;
    diag["mincover"] = d.mincover;
    diag["lp_objective"] = d.lp_objective;
    diag["rounded_min_strength"] = d.rounded_min_strength;
    diag["main_route_length"] = d.main_route_length;
    diag["main_route_split"] = d.main_route_split;
    diag["integral_feasible"] = d.integral_feasible;
    doc["diagnostics"] = std::move(diag);

    doc["main_route"] = map.main_route;
    doc["landmarks"] = map.landmarks;

    ojson lines = ojson::array();
    for (const auto& s : map.storylines) {
        ojson line;
        line["id"] = s.id;
        line["events"] = s.events;
        line["mean_strength"] = s.mean_strength ? ojson(*s.mean_strength) : ojson(nullptr);
        line["mean_acceptance"] = s.mean_acceptance;
        lines.push_back(std::move(line));
    }
    doc["storylines"] = std::move(lines);

    ojson nodes = ojson::array();
    for (const auto& n : map.nodes) {
        ojson node;
        node["id"] = n.id;
        node["title"] = n.title;
        node["created_at"] = n.created_at;
        node["score"] = n.score;
        node["upvote_ratio"] = n.upvote_ratio;
        node["score_percentile"] = n.score_percentile;
        node["storyline"] = n.storyline;
        node["representative_landmark"] = n.landmark;
        node["on_main_route"] = n.on_main_route;
        nodes.push_back(std::move(node));
    }
    doc["nodes"] = std::move(nodes);

    ojson edges = ojson::array();
    for (const auto& e : map.edges) {
        ojson edge;
        edge["source"] = e.source;
        edge["target"] = e.target;
        edge["coherence"] = e.coherence;
        edge["acceptance"] = e.acceptance;
        edge["strength"] = e.strength;
        edge["lp_value"] = e.lp_value;
        edge["on_main_route"] = e.on_main_route;
        edges.push_back(std::move(edge));
    }
    doc["edges"] = std::move(edges);
    return doc;
}

std::string to_document_text(const NarrativeMap& map) { return to_document(map).dump(2) + "\n"; }

NarrativeMap map_from_document(const ojson& doc) {
    if (field<int>(doc, "schema_version") != 1)
        throw Error(ErrorKind::InvalidConfig, "unsupported map schema_version");
    NarrativeMap map;
    map.params = field<ojson>(doc, "params");

    const ojson diag = field<ojson>(doc, "diagnostics");
    auto& d = map.diagnostics;
    d.avg_score_percentile = field<double>(diag, "avg_score_percentile");
    d.minscore = field<double>(diag, "minscore");
    d.acceptance_shortfall = field<bool>(diag, "acceptance_shortfall");
    d.removed_for_acceptance = field<std::vector<std::string>>(diag, "removed_for_acceptance");
    d.cluster_coverage = field<std::vector<double>>(diag, "cluster_coverage");
    d.average_coverage = field<double>(diag, "average_coverage");
    d.mincover = field<double>(diag, "mincover");
    d.lp_objective = field<double>(diag, "lp_objective");
    d.rounded_min_strength = field<double>(diag, "rounded_min_strength");
    d.main_route_length = field<std::size_t>(diag, "main_route_length");
    d.main_route_split = field<bool>(diag, "main_route_split");
    d.integral_feasible = field<bool>(diag, "integral_feasible");

    map.main_route = field<std::vector<std::string>>(doc, "main_route");
    map.landmarks = field<std::vector<std::string>>(doc, "landmarks");
    for (const auto& line : field<ojson>(doc, "storylines")) {
        Storyline s;
        s.id = field<std::size_t>(line, "id");
        s.events = field<std::vector<std::string>>(line, "events");
        const ojson ms = field<ojson>(line, "mean_strength");
        if (!ms.is_null()) s.mean_strength = field<double>(line, "mean_strength");
        s.mean_acceptance = field<double>(line, "mean_acceptance");
        map.storylines.push_back(std::move(s));
    }
    for (const auto& node : field<ojson>(doc, "nodes")) {
        MapNode n;
        n.id = field<std::string>(node, "id");
        n.title = field<std::string>(node, "title");
        n.created_at = field<std::int64_t>(node, "created_at");
        n.score = field<std::int64_t>(node, "score");
        n.upvote_ratio = field<double>(node, "upvote_ratio");
        n.score_percentile = field<double>(node, "score_percentile");
        n.storyline = field<std::size_t>(node, "storyline");
        n.landmark = field<bool>(node, "representative_landmark");
        n.on_main_route = field<bool>(node, "on_main_route");
        map.nodes.push_back(std::move(n));
    }
    for (const auto& edge : field<ojson>(doc, "edges")) {
        MapEdge e;
        e.source = field<std::string>(edge, "source");
        e.target = field<std::string>(edge, "target");
        e.coherence = field<double>(edge, "coherence");
        e.acceptance = field<double>(edge, "acceptance");
        e.strength = field<double>(edge, "strength");
        e.lp_value = field<double>(edge, "lp_value");
        e.on_main_route = field<bool>(edge, "on_main_route");
        map.edges.push_back(std::move(e));
    }
    return map;
}

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\r') {
            continue;
        } else {
            out += c;
        }
    }
    return out + "\"";
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void write_dot(std::ostream& out, const NarrativeMap& map) {
    out << "digraph narrative_map {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=box, style=rounded, fontsize=10];\n";
    for (const auto& n : map.nodes) {
        out << "  " << dot_quote(n.id) << " [label="
            << dot_quote(n.title + "\nur " + fixed2(n.upvote_ratio) + "  pct " + fixed2(n.score_percentile))
            << ", group=" << dot_quote("s" + std::to_string(n.storyline));
        if (n.landmark) out << ", peripheries=2";
        out << "];\n";
    }
    for (const auto& e : map.edges) {
        out << "  " << dot_quote(e.source) << " -> " << dot_quote(e.target) << " [label=" << dot_quote(fixed2(e.strength));
        if (e.on_main_route) out << ", style=dashed, color=blue";
        out << "];\n";
    }
    out << "}\n";
}

std::string to_dot(const NarrativeMap& map) {
    std::ostringstream out;
    write_dot(out, map);
    return out.str();
}

}  // namespace atlas
