#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace atlas::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// maximize c'x  subject to  row_lo <= A x <= row_hi,  lo <= x <= hi.
class LinearProgram {
public:
    struct Term {
        std::size_t var;
        double coef;
    };
    struct Row {
        std::vector<Term> terms;
        double lower;
        double upper;
    };

    std::size_t add_variable(double lower, double upper, double objective = 0.0);
    std::size_t add_row(std::vector<Term> terms, double lower, double upper);

    std::size_t num_variables() const { return objective_.size(); }
    std::size_t num_rows() const { return rows_.size(); }

    const std::vector<double>& objective() const { return objective_; }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    const std::vector<Row>& rows() const { return rows_; }

    /// Largest bound or row violation of `x`.
    double max_violation(const std::vector<double>& x) const;

private:
    std::vector<double> objective_, lower_, upper_;
    std::vector<Row> rows_;
};

enum class SimplexStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SimplexStatus status);

struct SimplexOptions {
    double feasibility_tolerance = 1e-9;
    double optimality_tolerance = 1e-9;
    double pivot_tolerance = 1e-7;
    double stable_pivot = 1e-5;           // smaller pivots are deferred while alternatives exist
    std::size_t refactor_interval = 64;
    std::size_t max_iterations = 0;       // 0: derived from problem size
    std::size_t degenerate_streak = 50;   // consecutive degenerate pivots before Bland's rule
    bool dual = true;                     // dual simplex first, primal cleanup afterwards
    double cost_perturbation = 1e-7;      // relative cost shift used by the dual pass; 0 disables
};

struct SimplexResult {
    SimplexStatus status = SimplexStatus::IterationLimit;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t iterations = 0;
    std::size_t phase_one_iterations = 0;
    std::size_t dual_iterations = 0;
};

/// Bounded-variable simplex on a sparse LU-factored basis. By default a dual
/// simplex with a bound-flipping ratio test runs on slightly perturbed costs,
/// then a primal pass restores the true costs. The primal pass uses Dantzig
/// pricing with lowest-index ties, a Harris ratio test, and Bland's rule after
/// a run of degenerate pivots. Every choice is deterministic.
SimplexResult solve(const LinearProgram& program, const SimplexOptions& options = {});

}  // namespace atlas::lp
