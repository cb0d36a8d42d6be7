#pragma once

#include "atlas/clustering.hpp"
#include "atlas/simplex.hpp"
#include "atlas/strength.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace atlas {

/// Constraint families of the extraction program.
enum class ConstraintClass {
    MinEdge,      // minedge <= 1 - edge + strength * edge
    Activation,   // event >= edge at both endpoints
    Route,        // active events have an incoming and an outgoing edge
    Anchor,       // start and end events are present
    Length,       // sum of edges >= K - 1
    Coverage,     // cluster presence and the average coverage floor
    Acceptance,   // average score percentile >= minscore
};

const char* to_string(ConstraintClass c);

struct ExtractionParams {
    std::size_t K = 8;
    double mincover = 0.5;
    double minscore = 0.85;
};

/// The program for one strength graph, with enough semantic context to
/// re-check a solution without the solver's matrix.
struct LpModel {
    ExtractionParams params;
    std::size_t num_events = 0;
    std::size_t num_clusters = 0;
    std::size_t start = 0;  // event index of the earliest event
    std::size_t end = 0;    // event index of the latest event

    std::vector<CandidateEdge> edges;
    std::vector<double> percentiles;                        // per event
    std::vector<std::vector<double>> edge_cluster_weight;  // [edge][k] = membership_ijk

    // Variable layout in `program`.
    std::size_t minedge_var = 0;
    std::size_t first_event_var = 0;
    std::size_t first_edge_var = 0;
    std::size_t first_cluster_var = 0;

    lp::LinearProgram program;
    std::vector<ConstraintClass> row_class;  // parallel to program.rows()

    std::size_t num_variables() const { return program.num_variables(); }
    std::size_t count_rows(ConstraintClass c) const;
};

/// Builds the max-min program. `memberships` must cover every graph event;
/// `percentiles` is indexed like graph.event_ids.
LpModel build_model(const StrengthGraph& graph, const MembershipMatrix& memberships,
                    const std::vector<double>& percentiles, const ExtractionParams& params);

enum class LpStatus { Optimal, Infeasible, UnboundedGuard };

const char* to_string(LpStatus s);

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    double minedge = 0.0;
    std::vector<double> events;
    std::vector<double> edges;
    std::vector<double> clusters;
    std::size_t iterations = 0;
    /// For infeasible programs: the constraint family that first makes the
    /// program infeasible when families are added in the order structure,
    /// acceptance, coverage.
    std::optional<std::string> infeasible_class;
};

LpSolution solve(const LpModel& model, const lp::SimplexOptions& options = {});

struct VerificationReport {
    bool applicable = false;  // false unless the solution is optimal
    double max_violation = 0.0;
    std::optional<ConstraintClass> worst_class;
    std::string worst_constraint;  // e.g. "C2 event[3] >= edge[1->3]"
};

/// Re-evaluates every constraint from the model's semantic data. Throws
/// SolverInconsistency when the worst violation exceeds `tolerance`.
VerificationReport verify_solution(const LpModel& model, const LpSolution& solution, double tolerance = 1e-6);

/// Same as verify_solution but never throws.
VerificationReport evaluate_constraints(const LpModel& model, const LpSolution& solution);

/// Human-readable LP text (CPLEX LP style) for cross-checking with external
/// solvers.
void write_lp_text(std::ostream& out, const LpModel& model, const std::vector<std::string>& event_ids);

}  // namespace atlas
