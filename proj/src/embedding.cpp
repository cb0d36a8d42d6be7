#include "atlas/embedding.hpp"

#include "atlas/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

namespace atlas {

using nlohmann::json;

void EmbeddingTable::insert(const std::string& id, std::span<const double> vector) {
    if (vector.empty()) throw Error(ErrorKind::DegenerateEmbedding, "degenerate embedding for '" + id + "': empty vector");
    if (dim_ != 0 && vector.size() != dim_)
        throw Error(ErrorKind::InconsistentDimension, "inconsistent dimension for '" + id + "': got " +
                                                          std::to_string(vector.size()) + ", expected " +
                                                          std::to_string(dim_));
    double norm = 0.0;
    for (double x : vector) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw Error(ErrorKind::DegenerateEmbedding, "degenerate embedding for '" + id + "': zero norm");
    std::vector<double> unit(vector.begin(), vector.end());
    // Already-unit vectors are kept bit for bit so that a write/load cycle is exact.
    if (std::abs(norm - 1.0) > 4 * std::numeric_limits<double>::epsilon())
        for (double& x : unit) x /= norm;
    dim_ = unit.size();
    vectors_[id] = std::move(unit);
}

std::span<const double> EmbeddingTable::at(const std::string& id) const {
    auto it = vectors_.find(id);
    if (it == vectors_.end()) throw Error(ErrorKind::UnembeddedEvent, "unembedded event '" + id + "'");
    return it->second;
}

EmbeddingTable load_embeddings(std::istream& in) {
    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string id;
        std::vector<double> vec;
        try {
            json j = json::parse(line);
            id = j.at("id").get<std::string>();
            vec = j.at("vector").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw Error(ErrorKind::CorruptSource, "malformed embedding record at line " + std::to_string(line_no) + ": " + e.what());
        }
        table.insert(id, vec);
    }
    return table;
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
    for (const auto& [id, vec] : table.vectors()) out << json{{"id", id}, {"vector", vec}}.dump() << '\n';
}

double angular_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw Error(ErrorKind::InconsistentDimension, "inconsistent dimension: " + std::to_string(u.size()) + " vs " +
                                                          std::to_string(v.size()));
    // Summation order is fixed so that sim(u, v) == sim(v, u) bit for bit.
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
    dot = std::clamp(dot, -1.0, 1.0);
    return 1.0 - std::acos(dot) / std::numbers::pi;
}

EmbeddingTable embed_with(EmbeddingProvider& provider, const std::vector<std::string>& ids,
                          const std::vector<std::string>& texts) {
    if (ids.size() != texts.size()) throw Error(ErrorKind::InvalidConfig, "ids and texts differ in length");
    auto vectors = provider.embed(texts);
    if (vectors.size() != ids.size())
        throw Error(ErrorKind::CorruptSource, "embedding provider returned " + std::to_string(vectors.size()) +
                                                  " vectors for " + std::to_string(ids.size()) + " texts");
    EmbeddingTable table;
    for (std::size_t i = 0; i < ids.size(); ++i) table.insert(ids[i], vectors[i]);
    return table;
}

}  // namespace atlas
