#include "atlas/synth.hpp"

#include "atlas/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>

namespace atlas {

const char* to_string(AcceptanceProfile p) {
    switch (p) {
        case AcceptanceProfile::Accepted: return "accepted";
        case AcceptanceProfile::Rejected: return "rejected";
        case AcceptanceProfile::Neutral: return "neutral";
    }
    return "unknown";
}

AcceptanceProfile parse_acceptance_profile(const std::string& text) {
    if (text == "accepted") return AcceptanceProfile::Accepted;
    if (text == "rejected") return AcceptanceProfile::Rejected;
    if (text == "neutral") return AcceptanceProfile::Neutral;
    throw Error(ErrorKind::InvalidProfile, "invalid profile: unknown acceptance profile \"" + text + "\"");
}

std::optional<std::size_t> PlantedCorpus::chain_of(const std::string& id) const {
    for (std::size_t c = 0; c < planted.size(); ++c)
        if (std::find(planted[c].begin(), planted[c].end(), id) != planted[c].end()) return c;
    return std::nullopt;
}

namespace {

std::string event_id(std::size_t chain, std::size_t pos) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "c%zue%03zu", chain, pos);
    return buf;
}

std::vector<double> unit(std::vector<double> v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

}  // namespace

PlantedCorpus generate_planted_corpus(const PlantedSpec& spec) {
    const std::size_t chains = spec.chain_lengths.size();
    if (chains == 0) throw Error(ErrorKind::InvalidProfile, "invalid profile: at least one chain is required");
    for (std::size_t len : spec.chain_lengths)
        if (len < 2) throw Error(ErrorKind::InvalidProfile, "invalid profile: chains need at least 2 events");
    if (spec.profiles.size() != 1 && spec.profiles.size() != chains)
        throw Error(ErrorKind::InvalidProfile, "invalid profile: give one acceptance profile or one per chain");
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma))
        throw Error(ErrorKind::InvalidProfile, "invalid profile: noise sigma must be a finite non-negative number");
    if (spec.dim < 2) throw Error(ErrorKind::InvalidProfile, "invalid profile: embedding dimension must be at least 2");
    if (spec.span_seconds < 2) throw Error(ErrorKind::InvalidProfile, "invalid profile: time span too short");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> inner_time(spec.start_time + 1, spec.start_time + spec.span_seconds - 1);

    PlantedCorpus out;
    out.noise_sigma = spec.noise_sigma;
    out.seed = spec.seed;
    std::vector<Submission> subs;

    for (std::size_t c = 0; c < chains; ++c) {
        const AcceptanceProfile profile = spec.profiles.size() == 1 ? spec.profiles[0] : spec.profiles[c];
        out.profiles.push_back(profile);
        const std::size_t len = spec.chain_lengths[c];

        std::vector<double> anchor(spec.dim);
        for (double& x : anchor) x = gauss(rng);
        anchor = unit(std::move(anchor));

        std::vector<std::int64_t> times;
        for (std::size_t i = 0; i < len; ++i) times.push_back(inner_time(rng));
        std::sort(times.begin(), times.end());
        if (c == 0) {
            times.front() = spec.start_time;
            times.back() = spec.start_time + spec.span_seconds;
        }

        std::vector<double> walk(spec.dim, 0.0);
        std::vector<std::string> chain;
        for (std::size_t i = 0; i < len; ++i) {
            if (i > 0)
                for (double& x : walk) x += spec.noise_sigma * gauss(rng);
            std::vector<double> v(spec.dim);
            for (std::size_t d = 0; d < spec.dim; ++d) v[d] = anchor[d] + walk[d];

            Submission s;
            s.id = event_id(c, i);
            s.community = spec.community;
            s.title = "Planted story " + std::to_string(c) + ", part " + std::to_string(i);
            s.created_at = times[i];
            switch (profile) {
                case AcceptanceProfile::Accepted:
                    s.score = std::uniform_int_distribution<std::int64_t>(500, 1500)(rng);
                    s.upvote_ratio = std::uniform_real_distribution<double>(0.85, 1.0)(rng);
                    break;
                case AcceptanceProfile::Rejected:
                    s.score = std::uniform_int_distribution<std::int64_t>(-20, 40)(rng);
                    s.upvote_ratio = std::uniform_real_distribution<double>(0.2, 0.5)(rng);
                    break;
                case AcceptanceProfile::Neutral:
                    s.score = 100;
                    s.upvote_ratio = 0.9;
                    break;
            }
            out.embeddings.insert(s.id, v);
            chain.push_back(s.id);
            subs.push_back(std::move(s));
        }
        out.planted.push_back(std::move(chain));
    }
    out.corpus = Corpus(spec.community, std::move(subs));
    return out;
}

RecoveryMetrics evaluate_recovery(const NarrativeMap& map, const PlantedCorpus& planted) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> chain_pos;
    for (std::size_t c = 0; c < planted.planted.size(); ++c)
        for (std::size_t i = 0; i < planted.planted[c].size(); ++i) chain_pos[planted.planted[c][i]] = {c, i};
    auto check = [&](const std::string& id) {
        if (!chain_pos.count(id)) throw Error(ErrorKind::ForeignMap, "foreign map: event \"" + id + "\" is not in the planted corpus");
    };
    for (const auto& n : map.nodes) check(n.id);
    for (const auto& e : map.edges) {
        check(e.source);
        check(e.target);
    }

    std::map<std::string, std::pair<std::size_t, std::size_t>> line_pos;
    for (const auto& line : map.storylines)
        for (std::size_t i = 0; i < line.events.size(); ++i) line_pos[line.events[i]] = {line.id, i};
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& e : map.edges) edges.insert({e.source, e.target});

    RecoveryMetrics m;
    std::size_t pairs = 0, hits = 0;
    for (const auto& chain : planted.planted) {
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
            ++pairs;
            const auto& a = chain[i];
            const auto& b = chain[i + 1];
            bool found = edges.count({a, b}) != 0;
            const auto pa = line_pos.find(a), pb = line_pos.find(b);
            if (!found && pa != line_pos.end() && pb != line_pos.end() && pa->second.first == pb->second.first) {
                const auto gap = static_cast<long long>(pb->second.second) - static_cast<long long>(pa->second.second);
                found = gap >= 1 && gap <= 2;
            }
            if (found) ++hits;
        }
    }
    m.adjacency_recall = pairs ? static_cast<double>(hits) / static_cast<double>(pairs) : 0.0;

    std::size_t good = 0;
    for (const auto& e : map.edges) {
        const auto& u = chain_pos.at(e.source);
        const auto& v = chain_pos.at(e.target);
        if (u.first == v.first && v.second > u.second && v.second - u.second <= 2) ++good;
    }
    m.adjacency_precision = map.edges.empty() ? 0.0 : static_cast<double>(good) / static_cast<double>(map.edges.size());

    std::set<std::size_t> present, marked;
    for (const auto& n : map.nodes) present.insert(chain_pos.at(n.id).first);
    for (const auto& id : map.landmarks) {
        check(id);
        marked.insert(chain_pos.at(id).first);
    }
    if (map.landmarks.empty() && present.size() <= 1) m.landmark_hit_rate = present.empty() ? 0.0 : 1.0;
    else m.landmark_hit_rate = present.empty() ? 0.0 : static_cast<double>(marked.size()) / static_cast<double>(present.size());

    std::map<std::size_t, std::size_t> counts;
    for (const auto& id : map.main_route) {
        check(id);
        ++counts[chain_pos.at(id).first];
    }
    std::size_t best = 0;
    for (const auto& [chain, count] : counts)
        if (count > best) {
            best = count;
            m.majority_chain = chain;
        }
    m.main_route_purity = map.main_route.empty() ? 0.0 : static_cast<double>(best) / static_cast<double>(map.main_route.size());
    return m;
}

}  // namespace atlas
