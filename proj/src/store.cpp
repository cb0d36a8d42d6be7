#include "atlas/store.hpp"

#include "atlas/error.hpp"
#include "atlas/hashing.hpp"
#include "atlas/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace atlas {

namespace fs = std::filesystem;

namespace {

bool is_digest(const std::string& id) {
    return id.size() == 64 && std::all_of(id.begin(), id.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

void write_atomically(const fs::path& target, const std::string& bytes) {
    static std::atomic<unsigned long> counter{0};
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + target.parent_path().string() + ": " + ec.message());
    std::ostringstream name;
    name << target.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
         << counter++;
    const fs::path tmp = target.parent_path() / name.str();
    {
        std::ofstream out(tmp, std::ios::binary);
        out << bytes;
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::NotFound, "file not found: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

Store::Store(fs::path root) : root_(std::move(root)) {}

fs::path Store::default_root() {
    if (const char* env = std::getenv("NARRATIVE_ATLAS_STORE"); env && *env) return env;
    return ".narrative_atlas";
}

std::vector<CommunityCount> Store::community_counts(const CorpusSet& corpora) {
    std::vector<CommunityCount> counts;
    for (const auto& [name, corpus] : corpora) counts.push_back({name, corpus.size()});
    std::stable_sort(counts.begin(), counts.end(),
                     [](const CommunityCount& a, const CommunityCount& b) { return a.count > b.count; });
    return counts;
}

std::string Store::put_corpus(const CorpusSet& corpora) {
    const std::string bytes = canonical_corpus_bytes(corpora);
    const std::string id = sha256_hex(bytes);
    const fs::path path = root_ / "corpora" / (id + ".jsonl");
    if (!fs::exists(path)) write_atomically(path, bytes);
    return id;
}

bool Store::has_corpus(const std::string& id) const {
    return is_digest(id) && fs::exists(root_ / "corpora" / (id + ".jsonl"));
}

CorpusSet Store::load_corpus(const std::string& id) const {
    if (!has_corpus(id)) throw Error(ErrorKind::NotFound, "unknown corpus \"" + id + "\"");
    std::istringstream in(read_file(root_ / "corpora" / (id + ".jsonl")));
    return load_submissions(in);
}

std::vector<CorpusInfo> Store::list_corpora() const {
    std::vector<CorpusInfo> out;
    const fs::path dir = root_ / "corpora";
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() == 70 && name.ends_with(".jsonl") && is_digest(name.substr(0, 64))) ids.push_back(name.substr(0, 64));
    }
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) {
        CorpusInfo info;
        info.id = id;
        info.communities = community_counts(load_corpus(id));
        info.has_embeddings = has_embeddings(id);
        out.push_back(std::move(info));
    }
    return out;
}

std::string Store::put_embeddings(const std::string& corpus_id, const EmbeddingTable& table) {
    if (!has_corpus(corpus_id)) throw Error(ErrorKind::NotFound, "unknown corpus \"" + corpus_id + "\"");
    const std::string bytes = canonical_embedding_bytes(table);
    write_atomically(root_ / "embeddings" / (corpus_id + ".jsonl"), bytes);
    return sha256_hex(bytes);
}

bool Store::has_embeddings(const std::string& corpus_id) const {
    return is_digest(corpus_id) && fs::exists(root_ / "embeddings" / (corpus_id + ".jsonl"));
}

EmbeddingTable Store::load_embeddings(const std::string& corpus_id) const {
    if (!has_embeddings(corpus_id))
        throw Error(ErrorKind::NotFound, "no embeddings imported for corpus \"" + corpus_id + "\"");
    std::istringstream in(read_file(root_ / "embeddings" / (corpus_id + ".jsonl")));
    return atlas::load_embeddings(in);
}

std::string Store::put_map(const std::string& document) {
    const std::string id = sha256_hex(document);
    const fs::path path = root_ / "maps" / (id + ".json");
    if (!fs::exists(path)) write_atomically(path, document);
    return id;
}

std::optional<std::string> Store::load_map(const std::string& id) const {
    if (!is_digest(id)) return std::nullopt;
    const fs::path path = root_ / "maps" / (id + ".json");
    if (!fs::exists(path)) return std::nullopt;
    return read_file(path);
}

}  // namespace atlas
