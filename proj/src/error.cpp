#include "atlas/error.hpp"

namespace atlas {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::EmptyCorpus: return "empty corpus";
        case ErrorKind::CorruptSource: return "corrupt source";
        case ErrorKind::DuplicateId: return "duplicate id";
        case ErrorKind::EmptyFilteredCorpus: return "empty filtered corpus";
        case ErrorKind::InconsistentDimension: return "inconsistent dimension";
        case ErrorKind::DegenerateEmbedding: return "degenerate embedding";
        case ErrorKind::UnembeddedEvent: return "unembedded event";
        case ErrorKind::InvalidClusterCount: return "invalid cluster count";
        case ErrorKind::InvalidDistribution: return "invalid distribution";
        case ErrorKind::InvalidClusterIndex: return "invalid cluster index";
        case ErrorKind::UnclusteredEvent: return "unclustered event";
        case ErrorKind::UnscoredEvent: return "unscored event";
        case ErrorKind::InsufficientEvents: return "insufficient events";
        case ErrorKind::InvalidK: return "invalid K";
        case ErrorKind::Infeasible: return "infeasible";
        case ErrorKind::SolverInconsistency: return "solver inconsistency";
        case ErrorKind::EmptyMap: return "empty map";
        case ErrorKind::NoMainRoute: return "no main route";
        case ErrorKind::InvalidProfile: return "invalid profile";
        case ErrorKind::ForeignMap: return "foreign map";
        case ErrorKind::InvalidConfig: return "invalid config";
        case ErrorKind::NotFound: return "not found";
        case ErrorKind::Io: return "i/o error";
    }
    return "unknown";
}

}  // namespace atlas
