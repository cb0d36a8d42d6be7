// narrative_atlas: ingest posts, import embeddings, extract and export
// narrative maps, or serve them over HTTP.

#include "atlas/error.hpp"
#include "atlas/hashing.hpp"
#include "atlas/mapgraph.hpp"
#include "atlas/pipeline.hpp"
#include "atlas/service.hpp"
#include "atlas/store.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <list>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace atlas;

namespace {

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Infeasible:
            return 3;
        case ErrorKind::InvalidConfig:
        case ErrorKind::InvalidK:
        case ErrorKind::InvalidClusterCount:
        case ErrorKind::NotFound:
        case ErrorKind::Io:
        case ErrorKind::CorruptSource:
        case ErrorKind::EmptyCorpus:
        case ErrorKind::DuplicateId:
        case ErrorKind::EmptyFilteredCorpus:
        case ErrorKind::InconsistentDimension:
        case ErrorKind::DegenerateEmbedding:
            return 2;
        default:
            return 1;
    }
}

std::ifstream open_input(const std::string& path) {
    if (!fs::exists(path)) throw Error(ErrorKind::NotFound, "file not found: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    return in;
}

void write_output(const std::optional<std::string>& path, const std::string& text) {
    if (!path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorKind::Io, "cannot write " + *path);
}

std::string render(const NarrativeMap& map, const std::string& format) {
    return format == "dot" ? to_dot(map) : to_document_text(map);
}

// Config flags are collected as text and applied through the same parser as
// config files, so validation messages match everywhere.
struct ConfigFlags {
    std::optional<std::string> config_file;
    std::list<std::pair<std::string, std::optional<std::string>>> values;  // stable addresses for CLI11

    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        values.emplace_back(key, std::nullopt);
        auto& slot = values.back().second;
        app->add_option(flag, slot, help);
    }

    ExtractionConfig resolve() const {
        ExtractionConfig config;
        if (config_file) {
            auto in = open_input(*config_file);
            config = load_config(in);
        }
        for (const auto& [key, value] : values)
            if (value) apply_setting(config, key, *value);
        validate(config);
        return config;
    }
};

Service* running_service = nullptr;

void handle_signal(int) {
    if (running_service) running_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extract narrative maps from community-scored posts"};
    app.require_subcommand(1);
    std::optional<std::string> store_path;
    app.add_option("--store", store_path, "Store directory (default: $NARRATIVE_ATLAS_STORE or ./.narrative_atlas)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Load line-delimited submissions into the store");
    std::vector<std::string> ingest_paths;
    std::string ingest_keyword;
    std::optional<std::string> ingest_from, ingest_to, ingest_community;
    ingest->add_option("paths", ingest_paths, "Submission files (one JSON record per line)")->required();
    ingest->add_option("--keyword", ingest_keyword, "Keep posts mentioning this word (case-insensitive)");
    ingest->add_option("--from", ingest_from, "Earliest creation time (epoch seconds or ISO date)");
    ingest->add_option("--to", ingest_to, "Latest creation time (epoch seconds or ISO date)");
    ingest->add_option("--community", ingest_community, "Keep only this community");

    // embed-import
    auto* embed = app.add_subcommand("embed-import", "Attach precomputed embeddings to a stored corpus");
    std::string embed_corpus, embed_path;
    embed->add_option("corpus", embed_corpus, "Corpus id")->required();
    embed->add_option("path", embed_path, "Embedding file: {\"id\": ..., \"vector\": [...]} per line")->required();

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "Extract a narrative map from a stored corpus");
    std::string extract_corpus;
    ConfigFlags flags;
    std::string extract_format = "doc";
    std::optional<std::string> extract_output;
    bool print_config = false;
    extract_cmd->add_option("corpus", extract_corpus, "Corpus id");
    extract_cmd->add_option("--config", flags.config_file, "Config file with key = value lines");
    flags.add(extract_cmd, "--keyword", "keyword", "Keep posts mentioning this word");
    flags.add(extract_cmd, "--from", "from", "Earliest creation time (epoch seconds or ISO date)");
    flags.add(extract_cmd, "--to", "to", "Latest creation time (epoch seconds or ISO date)");
    flags.add(extract_cmd, "--community", "community", "Community to analyse (default: the largest)");
    flags.add(extract_cmd, "--k", "K", "Expected main storyline length (default 8)");
    flags.add(extract_cmd, "--mincover", "mincover", "Minimum average cluster coverage (default 0.5)");
    flags.add(extract_cmd, "--minscore", "minscore", "Minimum average score percentile (default 0.85)");
    flags.add(extract_cmd, "--num-clusters", "num_clusters", "Cluster count or 'auto'");
    flags.add(extract_cmd, "--seed", "seed", "Clustering seed (default 0)");
    flags.add(extract_cmd, "--temperature", "temperature", "Soft membership temperature (default 0.1)");
    flags.add(extract_cmd, "--max-successors", "max_successors", "Candidate successors per post, or 'all' (default 20)");
    flags.add(extract_cmd, "--tau", "tau", "Rounding threshold relative to the largest edge value (default 0.5)");
    flags.add(extract_cmd, "--main-route", "main_route", "bottleneck or max-product");
    extract_cmd->add_option("--format", extract_format, "Output format")->check(CLI::IsMember({"doc", "dot"}));
    extract_cmd->add_option("--output", extract_output, "Output file (default: stdout)");
    extract_cmd->add_flag("--print-config", print_config, "Print the effective config and exit");

    // export
    auto* export_cmd = app.add_subcommand("export", "Render a stored map");
    std::string export_id, export_format = "doc";
    std::optional<std::string> export_output;
    export_cmd->add_option("map", export_id, "Map id")->required();
    export_cmd->add_option("--format", export_format, "Output format")->check(CLI::IsMember({"doc", "dot"}));
    export_cmd->add_option("--output", export_output, "Output file (default: stdout)");

    // serve
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    ServiceOptions service_options;
    double timeout_seconds = 60.0;
    serve->add_option("--port", service_options.port, "Port (default 8080)");
    serve->add_option("--host", service_options.host, "Bind address (default 127.0.0.1)");
    serve->add_option("--timeout", timeout_seconds, "Per-request extraction timeout in seconds (default 60)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        Store store(store_path ? fs::path(*store_path) : Store::default_root());

        if (*ingest) {
            std::ostringstream all;
            for (const auto& path : ingest_paths) {
                auto in = open_input(path);
                all << in.rdbuf() << '\n';
            }
            std::istringstream in(all.str());
            LoadReport report;
            CorpusSet loaded = load_submissions(in, {}, &report);
            if (report.malformed_lines > 0) {
                std::cerr << "warning: skipped " << report.malformed_lines << " malformed line(s):";
                for (std::size_t n : report.malformed_line_numbers) std::cerr << ' ' << n;
                std::cerr << '\n';
            }
            TimeWindow window;
            if (ingest_from) window.start = parse_time(*ingest_from);
            if (ingest_to) window.end = parse_time(*ingest_to);
            if (window.start > window.end) throw Error(ErrorKind::InvalidConfig, "from is after to");
            CorpusSet kept;
            for (const auto& [name, corpus] : loaded) {
                if (ingest_community && name != *ingest_community) continue;
                try {
                    kept.emplace(name, filter_corpus(corpus, ingest_keyword, window));
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::EmptyFilteredCorpus) throw;
                }
            }
            if (kept.empty()) throw Error(ErrorKind::EmptyFilteredCorpus, "empty filtered corpus: no post matches the filters");
            const std::string id = store.put_corpus(kept);
            std::cout << "corpus " << id << '\n';
            for (const auto& c : Store::community_counts(kept)) std::cout << "  " << c.name << '\t' << c.count << '\n';
            return 0;
        }

        if (*embed) {
            auto in = open_input(embed_path);
            const EmbeddingTable table = load_embeddings(in);
            const std::string hash = store.put_embeddings(embed_corpus, table);
            std::cout << "embeddings " << hash << '\n'
                      << "  " << table.size() << " vectors of dimension " << table.dim() << '\n';
            return 0;
        }

        if (*extract_cmd) {
            const ExtractionConfig config = flags.resolve();
            if (print_config) {
                std::cout << config_to_json(config).dump(2) << '\n';
                return 0;
            }
            if (extract_corpus.empty()) throw Error(ErrorKind::InvalidConfig, "extract needs a corpus id");
            const CorpusSet corpora = store.load_corpus(extract_corpus);
            const EmbeddingTable embeddings = store.load_embeddings(extract_corpus);
            const ExtractionResult result = extract(config, corpora, embeddings);
            const std::string map_id = store.put_map(to_document_text(result.map));
            write_output(extract_output, render(result.map, extract_format));
            std::cerr << "map " << map_id << ": " << result.map.nodes.size() << " events, " << result.map.edges.size()
                      << " edges, " << result.map.storylines.size() << " storylines ("
                      << result.telemetry.total_ms << " ms)\n";
            return 0;
        }

        if (*export_cmd) {
            const auto doc = store.load_map(export_id);
            if (!doc) throw Error(ErrorKind::NotFound, "unknown map \"" + export_id + "\"");
            const NarrativeMap map = map_from_document(nlohmann::ordered_json::parse(*doc));
            write_output(export_output, render(map, export_format));
            return 0;
        }

        if (*serve) {
            service_options.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_seconds * 1000.0));
            Service service(store, service_options);
            const int port = service.bind();
            if (port < 0) throw Error(ErrorKind::Io, "cannot bind " + service_options.host + ":" + std::to_string(service_options.port));
            running_service = &service;
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            std::cerr << "serving " << store.root().string() << " on http://" << service_options.host << ':' << port << '\n';
            const bool ok = service.listen();
            running_service = nullptr;
            return ok ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error";
        if (!e.stage().empty()) std::cerr << " [" << e.stage() << ']';
        std::cerr << ": " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed stored document: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
