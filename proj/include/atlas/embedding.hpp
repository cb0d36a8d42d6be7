#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace atlas {

/// Externally computed text embeddings, L2-normalized on insertion.
class EmbeddingTable {
public:
    EmbeddingTable() = default;

    /// Normalizes and stores `vector`. Throws DegenerateEmbedding for a zero
    /// vector and InconsistentDimension when the length differs from the
    /// vectors already stored.
    void insert(const std::string& id, std::span<const double> vector);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    bool contains(const std::string& id) const { return vectors_.count(id) != 0; }

    /// Throws UnembeddedEvent for unknown ids.
    std::span<const double> at(const std::string& id) const;

    const std::map<std::string, std::vector<double>>& vectors() const { return vectors_; }

private:
    std::size_t dim_ = 0;
    std::map<std::string, std::vector<double>> vectors_;
};

/// Reads `{"id": ..., "vector": [...]}` records, one per line.
EmbeddingTable load_embeddings(std::istream& in);
void write_embeddings(std::ostream& out, const EmbeddingTable& table);

/// 1 - arccos(u.v) / pi, with the dot product clamped to [-1, 1].
double angular_similarity(std::span<const double> u, std::span<const double> v);

/// Source of embeddings for texts, e.g. a client for an embedding service.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    /// Returns one vector per input text, in order.
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

/// Embeds `texts` through `provider` and stores the results under `ids`.
EmbeddingTable embed_with(EmbeddingProvider& provider, const std::vector<std::string>& ids,
                          const std::vector<std::string>& texts);

}  // namespace atlas
