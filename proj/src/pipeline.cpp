#include "atlas/pipeline.hpp"

#include "atlas/clustering.hpp"
#include "atlas/error.hpp"
#include "atlas/hashing.hpp"
#include "atlas/strength.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

namespace atlas {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& message) { throw Error(ErrorKind::InvalidConfig, message); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string& text, T& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t v = 0;
    if (!parse_number(value, v)) bad(key + " must be a non-negative integer");
    return v;
}

double parse_real(const std::string& key, const std::string& value) {
    double v = 0.0;
    if (!parse_number(value, v) || !std::isfinite(v)) bad(key + " must be a number");
    return v;
}

}  // namespace

std::int64_t parse_time(const std::string& raw) {
    const std::string text = trim(raw);
    std::int64_t epoch = 0;
    if (parse_number(text, epoch)) return epoch;

    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, used = 0;
    const bool date_only = std::sscanf(text.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &used) == 3 &&
                           static_cast<std::size_t>(used) == text.size();
    if (!date_only) {
        used = 0;
        const int got = std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s, &used);
        std::size_t end = static_cast<std::size_t>(used);
        if (got == 6 && end < text.size() && text[end] == 'Z') ++end;
        if (got != 6 || end != text.size()) bad("time \"" + text + "\" is neither epoch seconds nor an ISO date");
    }
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) bad("time \"" + text + "\" is not a valid date");
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + s;
}

void validate(const ExtractionConfig& c) {
    if (c.K < 2) throw Error(ErrorKind::InvalidK, "invalid K: K must be at least 2");
    if (!(c.mincover >= 0.0 && c.mincover <= 1.0)) bad("mincover out of range");
    if (!(c.minscore >= 0.0 && c.minscore <= 1.0)) bad("minscore out of range");
    if (!(c.tau >= 0.0 && c.tau <= 1.0)) bad("tau out of range");
    if (!(c.temperature > 0.0) || !std::isfinite(c.temperature)) bad("temperature out of range");
    if (c.num_clusters && *c.num_clusters < 2) bad("num_clusters out of range");
    if (c.max_successors == 0) bad("max_successors out of range");
    if (c.from && c.to && *c.from > *c.to) bad("from is after to");
}

ojson config_to_json(const ExtractionConfig& c) {
    ojson j;
    j["keyword"] = c.keyword;
    j["from"] = c.from ? ojson(*c.from) : ojson(nullptr);
    j["to"] = c.to ? ojson(*c.to) : ojson(nullptr);
    j["community"] = c.community.empty() ? ojson(nullptr) : ojson(c.community);
    j["K"] = c.K;
    j["mincover"] = c.mincover;
    j["minscore"] = c.minscore;
    j["num_clusters"] = c.num_clusters ? ojson(*c.num_clusters) : ojson("auto");
    j["seed"] = c.seed;
    j["temperature"] = c.temperature;
    j["max_successors"] = c.max_successors == kAllSuccessors ? ojson("all") : ojson(c.max_successors);
    j["tau"] = c.tau;
    j["main_route"] = to_string(c.main_route);
    return j;
}

void apply_setting(ExtractionConfig& c, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key == "keyword") c.keyword = value;
    else if (key == "from") c.from = parse_time(value);
    else if (key == "to") c.to = parse_time(value);
    else if (key == "community") c.community = value;
    else if (key == "K" || key == "k") c.K = parse_count("K", value);
    else if (key == "mincover") c.mincover = parse_real("mincover", value);
    else if (key == "minscore") c.minscore = parse_real("minscore", value);
    else if (key == "num_clusters") {
        if (value == "auto") c.num_clusters.reset();
        else c.num_clusters = parse_count("num_clusters", value);
    } else if (key == "seed") {
        std::uint64_t v = 0;
        if (!parse_number(value, v)) bad("seed must be a non-negative integer");
        c.seed = v;
    } else if (key == "temperature") c.temperature = parse_real("temperature", value);
    else if (key == "max_successors") {
        if (value == "all") c.max_successors = kAllSuccessors;
        else c.max_successors = parse_count("max_successors", value);
    } else if (key == "tau") c.tau = parse_real("tau", value);
    else if (key == "main_route") {
        const auto r = parse_route_criterion(value);
        if (!r) bad("main_route must be \"bottleneck\" or \"max-product\"");
        c.main_route = *r;
    } else {
        bad("unknown config key \"" + key + "\"");
    }
}

ExtractionConfig load_config(std::istream& in, ExtractionConfig base) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) bad("config line " + std::to_string(number) + ": expected key = value");
        try {
            apply_setting(base, t.substr(0, eq), t.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(e.kind(), "config line " + std::to_string(number) + ": " + e.what());
        }
    }
    return base;
}

ExtractionConfig config_from_json(const nlohmann::json& object, ExtractionConfig base) {
    if (!object.is_object()) bad("config must be a JSON object");
    for (const auto& [key, value] : object.items()) {
        if (value.is_null()) {
            if (key == "from") base.from.reset();
            else if (key == "to") base.to.reset();
            else if (key == "community") base.community.clear();
            else if (key == "num_clusters") base.num_clusters.reset();
            else bad(key + " must not be null");
            continue;
        }
        if (value.is_string()) {
            apply_setting(base, key, value.get<std::string>());
        } else if (value.is_number_integer()) {
            if (value.is_number_unsigned() || value.get<std::int64_t>() >= 0 || key == "from" || key == "to")
                apply_setting(base, key, value.dump());
            else
                bad(key + " out of range");
        } else if (value.is_number_float()) {
            if (key == "mincover" || key == "minscore" || key == "tau" || key == "temperature")
                apply_setting(base, key, value.dump());
            else
                bad(key + " must be an integer");
        } else {
            bad(key + " has an unsupported type");
        }
    }
    return base;
}

ojson Telemetry::to_json() const {
    ojson j;
    ojson stages;
    for (const auto& [name, ms] : stage_ms) stages[name] = ms;
    j["stage_ms"] = std::move(stages);
    j["total_ms"] = total_ms;
    j["events"] = events;
    j["candidate_edges"] = candidate_edges;
    j["num_clusters"] = num_clusters;
    j["lp_rows"] = lp_rows;
    j["lp_variables"] = lp_variables;
    j["lp_iterations"] = lp_iterations;
    return j;
}

const Corpus& select_community(const ExtractionConfig& config, const CorpusSet& corpora) {
    if (!config.community.empty()) {
        const auto it = corpora.find(config.community);
        if (it == corpora.end()) throw Error(ErrorKind::NotFound, "unknown community \"" + config.community + "\"");
        return it->second;
    }
    const Corpus* best = nullptr;
    for (const auto& [name, corpus] : corpora)
        if (!best || corpus.size() > best->size()) best = &corpus;
    if (!best) throw Error(ErrorKind::EmptyCorpus, "empty corpus");
    return *best;
}

std::string canonical_corpus_bytes(const CorpusSet& corpora) {
    std::ostringstream out;
    for (const auto& [name, corpus] : corpora) write_submissions(out, corpus);
    return out.str();
}

std::string canonical_embedding_bytes(const EmbeddingTable& table) {
    std::ostringstream out;
    write_embeddings(out, table);
    return out.str();
}

namespace {

class StageClock {
public:
    explicit StageClock(Telemetry& t) : t_(t), begin_(std::chrono::steady_clock::now()), last_(begin_) {}

    template <class F>
    auto run(const char* stage, F&& f) {
        try {
            auto result = f();
            lap(stage);
            return result;
        } catch (const Error& e) {
            if (!e.stage().empty()) throw;
            throw e.with_stage(stage);
        }
    }

    void finish() {
        t_.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - begin_).count();
    }

private:
    void lap(const char* stage) {
        const auto now = std::chrono::steady_clock::now();
        t_.stage_ms.emplace_back(stage, std::chrono::duration<double, std::milli>(now - last_).count());
        last_ = now;
    }

    Telemetry& t_;
    std::chrono::steady_clock::time_point begin_, last_;
};

}  // namespace

ExtractionResult extract(const ExtractionConfig& config, const CorpusSet& corpora, const EmbeddingTable& embeddings) {
    ExtractionResult result;
    StageClock clock(result.telemetry);

    clock.run("config", [&] {
        validate(config);
        return 0;
    });

    const Corpus* source = nullptr;
    const Corpus corpus = clock.run("corpus", [&] {
        source = &select_community(config, corpora);
        const TimeWindow window{config.from.value_or(TimeWindow{}.start), config.to.value_or(TimeWindow{}.end)};
        Corpus filtered = filter_corpus(*source, config.keyword, window);
        if (filtered.size() < 2)
            throw Error(ErrorKind::InsufficientEvents,
                        "insufficient events: the filtered corpus has " + std::to_string(filtered.size()) +
                            " post; at least 2 are needed");
        return filtered;
    });
    result.telemetry.events = corpus.size();

    std::vector<std::string> ids;
    for (const auto& s : corpus.submissions()) ids.push_back(s.id);
    clock.run("embedding", [&] {
        std::vector<std::string> missing;
        for (const auto& id : ids)
            if (!embeddings.contains(id)) missing.push_back(id);
        if (!missing.empty()) {
            std::string list;
            for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
            throw Error(ErrorKind::UnembeddedEvent,
                        "unembedded event: " + std::to_string(missing.size()) + " post(s) lack embeddings: " + list);
        }
        return 0;
    });

    const MembershipMatrix memberships = clock.run("clustering", [&] {
        SoftClusterOptions opts;
        opts.num_clusters = config.num_clusters.value_or(default_cluster_count(corpus.size()));
        opts.seed = config.seed;
        opts.temperature = config.temperature;
        return soft_cluster(embeddings, ids, opts);
    });
    result.telemetry.num_clusters = memberships.num_clusters;

    const StrengthGraph graph = clock.run("strength", [&] {
        return build_strength_graph(corpus, embeddings, memberships, config.max_successors);
    });
    result.telemetry.candidate_edges = graph.edges.size();

    ExtractionParams params;
    params.K = config.K;
    params.mincover = config.mincover;
    params.minscore = config.minscore;
    const LpModel model = clock.run("lp-build", [&] {
        return build_model(graph, memberships, corpus.percentiles(), params);
    });
    result.telemetry.lp_rows = model.program.num_rows();
    result.telemetry.lp_variables = model.num_variables();

    const LpSolution solution = clock.run("lp", [&] {
        LpSolution s = solve(model);
        if (s.status == LpStatus::Infeasible)
            throw Error(ErrorKind::Infeasible, s.infeasible_class.value_or("structure") + " constraint infeasible");
        if (s.status != LpStatus::Optimal)
            throw Error(ErrorKind::SolverInconsistency, "solver inconsistency: the LP solver stopped without a verdict");
        verify_solution(model, s);
        return s;
    });
    result.telemetry.lp_iterations = solution.iterations;

    result.map = clock.run("mapgraph", [&] {
        RoundingOptions ropts;
        ropts.tau = config.tau;
        ropts.minscore = config.minscore;
        ropts.criterion = config.main_route;
        const MapSkeleton sk = round_solution(solution, graph, corpus.percentiles(), ropts);
        return build_narrative_map(sk, MapContext{corpus, memberships, model, solution, config.main_route});
    });

    ojson inputs;
    inputs["community"] = source->community();
    inputs["events"] = corpus.size();
    inputs["num_clusters"] = memberships.num_clusters;
    inputs["corpus_sha256"] = sha256_hex(canonical_corpus_bytes(CorpusSet{{source->community(), *source}}));
    inputs["embeddings_sha256"] = sha256_hex(canonical_embedding_bytes(embeddings));
    result.map.params["config"] = config_to_json(config);
    result.map.params["inputs"] = std::move(inputs);
    clock.finish();
    return result;
}

}  // namespace atlas
