#pragma once

#include "atlas/corpus.hpp"
#include "atlas/embedding.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace atlas {

struct CommunityCount {
    std::string name;
    std::size_t count = 0;
};

struct CorpusInfo {
    std::string id;
    std::vector<CommunityCount> communities;  // most posts first, then by name
    bool has_embeddings = false;
};

/// Content-addressed files under one root:
///   corpora/<sha256>.jsonl      canonical corpus bytes
///   embeddings/<corpus>.jsonl   vectors imported for a corpus
///   maps/<sha256>.json          exported map documents
/// Writes go through a temporary file and a rename, so concurrent readers
/// never see partial files.
class Store {
public:
    explicit Store(std::filesystem::path root);

    /// $NARRATIVE_ATLAS_STORE, or ./.narrative_atlas when unset.
    static std::filesystem::path default_root();

    const std::filesystem::path& root() const { return root_; }

    /// Returns the corpus id; identical content always maps to the same id.
    std::string put_corpus(const CorpusSet& corpora);
    CorpusSet load_corpus(const std::string& id) const;  // throws NotFound
    bool has_corpus(const std::string& id) const;
    std::vector<CorpusInfo> list_corpora() const;         // sorted by id

    /// Replaces the embeddings of a corpus; returns their content hash.
    std::string put_embeddings(const std::string& corpus_id, const EmbeddingTable& table);
    EmbeddingTable load_embeddings(const std::string& corpus_id) const;  // throws NotFound
    bool has_embeddings(const std::string& corpus_id) const;

    /// Stores a serialized map document; returns its id.
    std::string put_map(const std::string& document);
    std::optional<std::string> load_map(const std::string& id) const;

    static std::vector<CommunityCount> community_counts(const CorpusSet& corpora);

private:
    std::filesystem::path root_;
};

}  // namespace atlas
