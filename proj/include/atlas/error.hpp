#pragma once

#include <stdexcept>
#include <string>

namespace atlas {

/// Error categories surfaced to callers. The CLI and HTTP layers map these
/// onto exit codes and status codes.
enum class ErrorKind {
    EmptyCorpus,
    CorruptSource,
    DuplicateId,
    EmptyFilteredCorpus,
    InconsistentDimension,
    DegenerateEmbedding,
    UnembeddedEvent,
    InvalidClusterCount,
    InvalidDistribution,
    InvalidClusterIndex,
    UnclusteredEvent,
    UnscoredEvent,
    InsufficientEvents,
    InvalidK,
    Infeasible,
    SolverInconsistency,
    EmptyMap,
    NoMainRoute,
    InvalidProfile,
    ForeignMap,
    InvalidConfig,
    NotFound,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Pipeline stage that raised the error ("corpus", "lp", ...); empty when
    /// the error was raised outside a pipeline run.
    const std::string& stage() const noexcept { return stage_; }

    Error with_stage(std::string stage) const {
        Error e = *this;
        e.stage_ = std::move(stage);
        return e;
    }

private:
    ErrorKind kind_;
    std::string stage_;
};

}  // namespace atlas
