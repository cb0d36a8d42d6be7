#include "atlas/simplex.hpp"

#include "atlas/error.hpp"

#include <klu.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace atlas::lp {

std::size_t LinearProgram::add_variable(double lower, double upper, double objective) {
    objective_.push_back(objective);
    lower_.push_back(lower);
    upper_.push_back(upper);
    return objective_.size() - 1;
}

std::size_t LinearProgram::add_row(std::vector<Term> terms, double lower, double upper) {
    rows_.push_back(Row{std::move(terms), lower, upper});
    return rows_.size() - 1;
}

double LinearProgram::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        worst = std::max(worst, lower_[j] - x[j]);
        worst = std::max(worst, x[j] - upper_[j]);
    }
    for (const auto& row : rows_) {
        double a = 0.0;
        for (const auto& t : row.terms) a += t.coef * x[t.var];
        worst = std::max(worst, row.lower - a);
        worst = std::max(worst, a - row.upper);
    }
    return worst;
}

const char* to_string(SimplexStatus status) {
    switch (status) {
        case SimplexStatus::Optimal: return "optimal";
        case SimplexStatus::Infeasible: return "infeasible";
        case SimplexStatus::Unbounded: return "unbounded";
        case SimplexStatus::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

namespace {

using Vec = std::vector<double>;

// Owns a KLU factorization of a square sparse matrix in compressed-column form.
class KluFactor {
public:
    KluFactor() { klu_defaults(&common_); }
    KluFactor(const KluFactor&) = delete;
    KluFactor& operator=(const KluFactor&) = delete;
    ~KluFactor() { release(); }

    bool factor(int n, std::vector<int> col_ptr, std::vector<int> row_idx, std::vector<double> values) {
        release();
        n_ = n;
        col_ptr_ = std::move(col_ptr);
        row_idx_ = std::move(row_idx);
        values_ = std::move(values);
        symbolic_ = klu_analyze(n_, col_ptr_.data(), row_idx_.data(), &common_);
        if (!symbolic_) return false;
        numeric_ = klu_factor(col_ptr_.data(), row_idx_.data(), values_.data(), symbolic_, &common_);
        return numeric_ != nullptr && common_.status == KLU_OK;
    }

    void solve(Vec& b) { klu_solve(symbolic_, numeric_, n_, 1, b.data(), &common_); }
    void solve_transposed(Vec& b) { klu_tsolve(symbolic_, numeric_, n_, 1, b.data(), &common_); }

private:
    void release() {
        if (numeric_) klu_free_numeric(&numeric_, &common_);
        if (symbolic_) klu_free_symbolic(&symbolic_, &common_);
    }

    klu_common common_{};
    klu_symbolic* symbolic_ = nullptr;
    klu_numeric* numeric_ = nullptr;
    int n_ = 0;
    std::vector<int> col_ptr_, row_idx_;
    std::vector<double> values_;
};

enum class VarState : unsigned char { Basic, AtLower, AtUpper, Zero };

struct Eta {
    std::size_t pos;
    double pivot;
    std::vector<std::pair<std::size_t, double>> column;  // off-pivot entries of the ftran column
};

// Working state for one solve. Variables 0..n-1 are structural, n..n+m-1 are
// row logicals z_r with A_r x - z_r = 0 and row bounds on z_r.
class Solver {
public:
    Solver(const LinearProgram& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
        n_ = lp.num_variables();
        m_ = lp.num_rows();
        total_ = n_ + m_;

        col_start_.assign(n_ + 1, 0);
        for (const auto& row : lp.rows())
            for (const auto& t : row.terms) ++col_start_[t.var + 1];
        for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] += col_start_[j];
        col_row_.resize(col_start_[n_]);
        col_val_.resize(col_start_[n_]);
        std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
        for (std::size_t r = 0; r < m_; ++r)
            for (const auto& t : lp.rows()[r].terms) {
                col_row_[fill[t.var]] = r;
                col_val_[fill[t.var]++] = t.coef;
            }

        lo_.resize(total_);
        hi_.resize(total_);
        cost_.assign(total_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            lo_[j] = lp.lower()[j];
            hi_[j] = lp.upper()[j];
            cost_[j] = -lp.objective()[j];  // internal problem minimizes
        }
        for (std::size_t r = 0; r < m_; ++r) {
            lo_[n_ + r] = lp.rows()[r].lower;
            hi_[n_ + r] = lp.rows()[r].upper;
        }

        x_.assign(total_, 0.0);
        state_.assign(total_, VarState::AtLower);
        basis_pos_.assign(total_, npos);
        for (std::size_t j = 0; j < n_; ++j) {
            if (std::isfinite(lo_[j])) {
                state_[j] = VarState::AtLower;
                x_[j] = lo_[j];
            } else if (std::isfinite(hi_[j])) {
                state_[j] = VarState::AtUpper;
                x_[j] = hi_[j];
            } else {
                state_[j] = VarState::Zero;
            }
        }
        rejected_.assign(total_, 0);
        head_.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) {
            head_[r] = n_ + r;
            state_[n_ + r] = VarState::Basic;
            basis_pos_[n_ + r] = r;
        }
    }

    SimplexResult run() {
        SimplexResult result;
        const std::size_t limit = opt_.max_iterations ? opt_.max_iterations : 50 * (total_ + 100);
        if (opt_.dual && place_for_dual()) {
            const Vec true_cost = cost_;
            perturb_costs();
            result.status = dual_iterate(result, limit);
            cost_ = true_cost;
            if (result.status == SimplexStatus::Optimal) result.status = iterate(result, limit);
        } else {
            result.status = iterate(result, limit);
        }

        result.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
        if (result.status == SimplexStatus::Optimal) {
            for (std::size_t j = 0; j < n_; ++j) result.x[j] = std::clamp(result.x[j], lo_[j], hi_[j]);
        }
        double obj = 0.0;
        for (std::size_t j = 0; j < n_; ++j) obj += lp_.objective()[j] * result.x[j];
        result.objective = obj;
        return result;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // Moves each nonbasic structural to the bound its cost prefers so the
    // all-logical basis is dual feasible. Returns false if some variable has
    // no such bound.
    bool place_for_dual() {
        for (std::size_t j = 0; j < n_; ++j) {
            if (cost_[j] > 0.0 && !std::isfinite(lo_[j])) return false;
            if (cost_[j] < 0.0 && !std::isfinite(hi_[j])) return false;
        }
        for (std::size_t j = 0; j < n_; ++j) {
            const double c = cost_[j];
            if (c < 0.0 || (c == 0.0 && !std::isfinite(lo_[j]) && std::isfinite(hi_[j]))) {
                state_[j] = VarState::AtUpper;
                x_[j] = hi_[j];
            } else if (std::isfinite(lo_[j])) {
                state_[j] = VarState::AtLower;
                x_[j] = lo_[j];
            } else {
                state_[j] = VarState::Zero;
                x_[j] = 0.0;
            }
        }
        return true;
    }

    // Shifts structural costs away from zero in the direction that keeps the
    // starting basis dual feasible. The sequence is fixed so results do not
    // depend on a seed.
    void perturb_costs() {
        if (opt_.cost_perturbation <= 0.0) return;
        std::uint64_t state = 0x9E3779B97F4A7C15ull;
        auto next_unit = [&state] {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            return static_cast<double>(state >> 11) * 0x1.0p-53;
        };
        for (std::size_t j = 0; j < n_; ++j) {
            const double shift = opt_.cost_perturbation * (1.0 + std::abs(cost_[j])) * (0.5 + next_unit());
            if (state_[j] == VarState::AtLower) cost_[j] += shift;
            else if (state_[j] == VarState::AtUpper) cost_[j] -= shift;
        }
    }

    void recompute_duals() {
        Vec c(m_);
        for (std::size_t p = 0; p < m_; ++p) c[p] = cost_[head_[p]];
        const Vec y = btran(std::move(c));
        d_.assign(total_, 0.0);
        for (std::size_t j = 0; j < total_; ++j) {
            if (state_[j] == VarState::Basic) continue;
            double d = cost_[j];
            for_column(j, [&](std::size_t r, double a) { d -= y[r] * a; });
            d_[j] = d;
        }
    }

    // Dual simplex with a bound-flipping ratio test. Leaves the basis primal
    // feasible and dual feasible for the current (possibly perturbed) costs.
    SimplexStatus dual_iterate(SimplexResult& result, std::size_t limit) {
        refactor();
        recompute_duals();
        edge_weight_.assign(m_, 1.0);  // exact for the all-logical basis
        const double ftol = opt_.feasibility_tolerance;
        bool confirmed = false;
        Vec row(total_, 0.0);
        std::vector<std::size_t> touched;

        struct Candidate {
            std::size_t j;
            double ratio;
            double abs_alpha;
        };
        std::vector<Candidate> cands;

        for (;;) {
            if (result.iterations >= limit) return SimplexStatus::IterationLimit;
            if (etas_.size() >= opt_.refactor_interval) {
                refactor();
                recompute_duals();
            }

            // Leaving row: dual steepest edge, lowest position on ties.
            std::size_t r = npos;
            double worst = 0.0;
            for (std::size_t p = 0; p < m_; ++p) {
                const std::size_t j = head_[p];
                const double v = std::max(lo_[j] - x_[j], x_[j] - hi_[j]);
                if (v <= ftol) continue;
                const double score = v * v / edge_weight_[p];
                if (score > worst) {
                    worst = score;
                    r = p;
                }
            }
            if (r == npos) {
                if (!etas_.empty() && !confirmed) {
                    refactor();
                    recompute_duals();
                    confirmed = true;
                    continue;
                }
                return SimplexStatus::Optimal;
            }

            const std::size_t leaving = head_[r];
            const bool below = x_[leaving] < lo_[leaving];
            const double bound = below ? lo_[leaving] : hi_[leaving];
            const double delta = x_[leaving] - bound;

            Vec rho(m_, 0.0);
            rho[r] = 1.0;
            rho = btran(std::move(rho));

            for (std::size_t j : touched) row[j] = 0.0;
            touched.clear();
            cands.clear();
            for (std::size_t j = 0; j < total_; ++j) {
                const VarState s = state_[j];
                if (s == VarState::Basic) continue;
                double a = 0.0;
                for_column(j, [&](std::size_t i, double v) { a += rho[i] * v; });
                if (std::abs(a) < 1e-12) continue;
                row[j] = a;
                touched.push_back(j);
                if (hi_[j] - lo_[j] <= 0.0 || std::abs(a) < opt_.pivot_tolerance) continue;
                const double at = delta < 0.0 ? -a : a;
                const bool eligible = (s == VarState::AtLower && at > 0.0) || (s == VarState::AtUpper && at < 0.0) ||
                                      s == VarState::Zero;
                if (!eligible) continue;
                cands.push_back({j, std::max(0.0, d_[j] / at), std::abs(a)});
            }

            // Walk the breakpoints in ratio order, flipping boxed variables
            // while the dual objective keeps improving.
            std::stable_sort(cands.begin(), cands.end(),
                             [](const Candidate& a, const Candidate& b) { return a.ratio < b.ratio; });
            double slope = std::abs(delta);
            std::size_t q = npos;
            std::size_t group_begin = 0;
            std::vector<std::size_t> flips;
            while (group_begin < cands.size()) {
                const double tie = cands[group_begin].ratio + opt_.optimality_tolerance;
                std::size_t group_end = group_begin;
                double drop = 0.0;
                bool hard = false;
                while (group_end < cands.size() && cands[group_end].ratio <= tie) {
                    const auto& c = cands[group_end];
                    const double range = hi_[c.j] - lo_[c.j];
                    if (!std::isfinite(range)) hard = true;
                    else drop += range * c.abs_alpha;
                    ++group_end;
                }
                if (!hard && slope - drop > 0.0) {
                    slope -= drop;
                    for (std::size_t k = group_begin; k < group_end; ++k) flips.push_back(cands[k].j);
                    group_begin = group_end;
                    continue;
                }
                double best = 0.0;
                for (std::size_t k = group_begin; k < group_end; ++k)
                    if (cands[k].abs_alpha > best) {
                        best = cands[k].abs_alpha;
                        q = cands[k].j;
                    }
                break;
            }

            if (q == npos) {
                // Dual unbounded: the row cannot be brought within bounds.
                if (!confirmed) {
                    refactor();
                    recompute_duals();
                    confirmed = true;
                    continue;
                }
                return SimplexStatus::Infeasible;
            }
            confirmed = false;

            const double theta = d_[q] / row[q];
            const double rho_norm = std::inner_product(rho.begin(), rho.end(), rho.begin(), 0.0);
            for (std::size_t j : touched) {
                d_[j] -= theta * row[j];
                // Shift the cost of any variable pushed to the wrong side by
                // the tie tolerance so the basis stays dual feasible.
                if (state_[j] == VarState::AtLower && d_[j] < 0.0) {
                    cost_[j] -= d_[j];
                    d_[j] = 0.0;
                } else if (state_[j] == VarState::AtUpper && d_[j] > 0.0) {
                    cost_[j] -= d_[j];
                    d_[j] = 0.0;
                }
            }
            d_[q] = 0.0;

            if (!flips.empty()) {
                Vec shift(m_, 0.0);
                for (std::size_t j : flips) {
                    const double target = state_[j] == VarState::AtLower ? hi_[j] : lo_[j];
                    const double dx = target - x_[j];
                    state_[j] = state_[j] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
                    x_[j] = target;
                    for_column(j, [&](std::size_t i, double v) { shift[i] += v * dx; });
                }
                const Vec w = ftran(std::move(shift));
                for (std::size_t p = 0; p < m_; ++p)
                    if (w[p] != 0.0) x_[head_[p]] -= w[p];
            }

            const Vec alpha = ftran_column(q);
            if (std::abs(alpha[r] - row[q]) > 1e-6 * (1.0 + std::abs(row[q]))) {
                // Row and column disagree on the pivot: rebuild and retry.
                refactor();
                recompute_duals();
                continue;
            }

            const Vec tau = ftran(rho);
            const double ar = alpha[r];
            for (std::size_t p = 0; p < m_; ++p) {
                if (p == r || alpha[p] == 0.0) continue;
                const double ratio = alpha[p] / ar;
                edge_weight_[p] = std::max(edge_weight_[p] - 2.0 * ratio * tau[p] + ratio * ratio * rho_norm, ratio * ratio);
            }
            edge_weight_[r] = std::max(rho_norm / (ar * ar), 1e-12);

            const double step = (x_[leaving] - bound) / alpha[r];
            for (std::size_t p = 0; p < m_; ++p)
                if (alpha[p] != 0.0) x_[head_[p]] -= step * alpha[p];
            x_[q] += step;

            x_[leaving] = bound;
            state_[leaving] = below ? VarState::AtLower : VarState::AtUpper;
            d_[leaving] = -theta;
            basis_pos_[leaving] = npos;
            head_[r] = q;
            state_[q] = VarState::Basic;
            basis_pos_[q] = r;
            push_eta(r, alpha);
            ++result.iterations;
            ++result.dual_iterations;
        }
    }

    SimplexStatus iterate(SimplexResult& result, std::size_t limit) {
        SimplexStatus status = SimplexStatus::IterationLimit;
        refactor();
        std::size_t degenerate = 0;
        bool bland = false;

        for (std::size_t iter = 0;; ++iter) {
            if (result.iterations >= limit) {
                status = SimplexStatus::IterationLimit;
                break;
            }
            if (etas_.size() >= opt_.refactor_interval) refactor();

            const bool phase_one = set_phase_costs();
            if (phase_one) ++result.phase_one_iterations;

            Vec y = btran();
            std::size_t q = npos;
            int dir = 0;
            price(y, bland, q, dir);

            if (q == npos && !rejected_.empty()) {
                // Only candidates with unstable pivots remain; take them anyway.
                std::fill(rejected_.begin(), rejected_.end(), 0);
                rejected_any_ = false;
                allow_small_pivot_ = true;
                price(y, bland, q, dir);
            }
            if (q == npos) {
                // Confirm on a fresh factorization before declaring termination.
                if (!etas_.empty()) {
                    refactor();
                    continue;
                }
                status = phase_one ? SimplexStatus::Infeasible : SimplexStatus::Optimal;
                break;
            }

            Vec alpha = ftran_column(q);
            std::size_t leave = npos;
            double step = 0.0;
            bool leave_to_upper = false;
            bool flip = false;
            if (!ratio_test(q, dir, alpha, bland, leave, step, leave_to_upper, flip)) {
                status = phase_one ? SimplexStatus::Infeasible : SimplexStatus::Unbounded;
                break;
            }
            if (!flip && !allow_small_pivot_ && std::abs(alpha[leave]) < opt_.stable_pivot) {
                rejected_[q] = 1;
                rejected_any_ = true;
                continue;
            }
            allow_small_pivot_ = false;
            if (rejected_any_) {
                std::fill(rejected_.begin(), rejected_.end(), 0);
                rejected_any_ = false;
            }

            ++result.iterations;
            if (step <= 1e-12) {
                if (++degenerate > opt_.degenerate_streak) bland = true;
            } else {
                degenerate = 0;
                bland = false;
            }

            const double delta = dir * step;
            if (delta != 0.0) {
                for (std::size_t i = 0; i < m_; ++i)
                    if (alpha[i] != 0.0) x_[head_[i]] -= delta * alpha[i];
                x_[q] += delta;
            }
            if (flip) {
                state_[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
                x_[q] = dir > 0 ? hi_[q] : lo_[q];
                continue;
            }

            const std::size_t out = head_[leave];
            state_[out] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
            x_[out] = leave_to_upper ? hi_[out] : lo_[out];
            basis_pos_[out] = npos;
            head_[leave] = q;
            state_[q] = VarState::Basic;
            basis_pos_[q] = leave;
            push_eta(leave, alpha);
        }

        return status;
    }

    template <class F>
    void for_column(std::size_t j, F&& f) const {
        if (j < n_) {
            for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) f(col_row_[k], col_val_[k]);
        } else {
            f(j - n_, -1.0);
        }
    }

    void refactor() {
        std::vector<int> col_ptr{0}, row_idx;
        std::vector<double> values;
        for (std::size_t p = 0; p < m_; ++p) {
            for_column(head_[p], [&](std::size_t r, double v) {
                row_idx.push_back(static_cast<int>(r));
                values.push_back(v);
            });
            col_ptr.push_back(static_cast<int>(row_idx.size()));
        }
        if (!lu_.factor(static_cast<int>(m_), std::move(col_ptr), std::move(row_idx), std::move(values)))
            throw Error(ErrorKind::SolverInconsistency, "solver inconsistency: singular basis during refactorization");
        etas_.clear();

        // x_B = B^{-1} (-N x_N)
        Vec rhs(m_, 0.0);
        for (std::size_t j = 0; j < total_; ++j) {
            if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
            const double v = x_[j];
            for_column(j, [&](std::size_t r, double a) { rhs[r] -= a * v; });
        }
        lu_.solve(rhs);
        for (std::size_t p = 0; p < m_; ++p) x_[head_[p]] = rhs[p];
    }

    // Sets phase-one costs when some basic variable is out of bounds. Returns
    // whether phase one is active.
    bool set_phase_costs() {
        bool infeasible = false;
        for (std::size_t p = 0; p < m_; ++p) {
            const std::size_t j = head_[p];
            if (x_[j] < lo_[j] - opt_.feasibility_tolerance || x_[j] > hi_[j] + opt_.feasibility_tolerance) {
                infeasible = true;
                break;
            }
        }
        phase_cost_.assign(total_, 0.0);
        if (infeasible) {
            for (std::size_t p = 0; p < m_; ++p) {
                const std::size_t j = head_[p];
                if (x_[j] < lo_[j] - opt_.feasibility_tolerance) phase_cost_[j] = -1.0;
                else if (x_[j] > hi_[j] + opt_.feasibility_tolerance) phase_cost_[j] = 1.0;
            }
        } else {
            phase_cost_ = cost_;
        }
        return infeasible;
    }

    Vec btran() {
        Vec c(m_);
        for (std::size_t p = 0; p < m_; ++p) c[p] = phase_cost_[head_[p]];
        return btran(std::move(c));
    }

    Vec btran(Vec c) {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = c[it->pos];
            for (const auto& [i, a] : it->column) s -= a * c[i];
            c[it->pos] = s / it->pivot;
        }
        lu_.solve_transposed(c);
        return c;
    }

    Vec ftran_column(std::size_t q) {
        Vec w(m_, 0.0);
        for_column(q, [&](std::size_t r, double v) { w[r] = v; });
        return ftran(std::move(w));
    }

    Vec ftran(Vec w) {
        lu_.solve(w);
        for (const auto& eta : etas_) {
            const double wr = w[eta.pos];
            if (wr == 0.0) continue;
            const double t = wr / eta.pivot;
            for (const auto& [i, a_i] : eta.column) w[i] -= a_i * t;
            w[eta.pos] = t;
        }
        for (double& v : w)
            if (std::abs(v) < 1e-13) v = 0.0;
        return w;
    }

    void push_eta(std::size_t pos, const Vec& alpha) {
        Eta eta;
        eta.pos = pos;
        eta.pivot = alpha[pos];
        for (std::size_t i = 0; i < m_; ++i)
            if (i != pos && alpha[i] != 0.0) eta.column.emplace_back(i, alpha[i]);
        etas_.push_back(std::move(eta));
    }

    void price(const Vec& y, bool bland, std::size_t& q, int& dir) const {
        double best = 0.0;
        for (std::size_t j = 0; j < total_; ++j) {
            const VarState s = state_[j];
            if (s == VarState::Basic) continue;
            if (hi_[j] - lo_[j] <= 0.0 || rejected_[j]) continue;  // fixed or unstable
            double d = phase_cost_[j];
            for_column(j, [&](std::size_t r, double a) { d -= y[r] * a; });
            int candidate_dir = 0;
            if (d < -opt_.optimality_tolerance && (s == VarState::AtLower || s == VarState::Zero)) candidate_dir = 1;
            else if (d > opt_.optimality_tolerance && (s == VarState::AtUpper || s == VarState::Zero)) candidate_dir = -1;
            if (candidate_dir == 0) continue;
            if (bland) {
                q = j;
                dir = candidate_dir;
                return;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                q = j;
                dir = candidate_dir;
            }
        }
    }

    // Harris two-pass ratio test; Bland mode uses the textbook minimum ratio
    // with lowest-index ties. Returns false when the step is unbounded.
    bool ratio_test(std::size_t q, int dir, const Vec& alpha, bool bland, std::size_t& leave, double& step,
                    bool& leave_to_upper, bool& flip) const {
        const double ftol = opt_.feasibility_tolerance;
        struct Block {
            std::size_t pos;
            double ratio;
            double relaxed;
            bool to_upper;
        };
        std::vector<Block> blocks;
        for (std::size_t p = 0; p < m_; ++p) {
            const double a = alpha[p];
            if (std::abs(a) < opt_.pivot_tolerance) continue;
            const std::size_t j = head_[p];
            const double rate = -dir * a;
            const double xj = x_[j];
            if (rate < 0.0) {
                double bound;
                bool to_upper;
                if (xj > hi_[j] + ftol) { bound = hi_[j]; to_upper = true; }
                else if (xj < lo_[j] - ftol || !std::isfinite(lo_[j])) continue;
                else { bound = lo_[j]; to_upper = false; }
                const double r = std::max(0.0, (xj - bound) / -rate);
                blocks.push_back({p, r, (xj - bound + ftol) / -rate, to_upper});
            } else {
                double bound;
                bool to_upper;
                if (xj < lo_[j] - ftol) { bound = lo_[j]; to_upper = false; }
                else if (xj > hi_[j] + ftol || !std::isfinite(hi_[j])) continue;
                else { bound = hi_[j]; to_upper = true; }
                const double r = std::max(0.0, (bound - xj) / rate);
                blocks.push_back({p, r, (bound - xj + ftol) / rate, to_upper});
            }
        }
        const double own_range = hi_[q] - lo_[q];

        if (blocks.empty()) {
            if (!std::isfinite(own_range)) return false;
            flip = true;
            step = own_range;
            return true;
        }

        std::size_t chosen = npos;
        if (bland) {
            double best = kInf;
            for (const auto& b : blocks) best = std::min(best, b.ratio);
            for (const auto& b : blocks) {
                if (b.ratio > best + 1e-12) continue;
                if (chosen == npos || head_[b.pos] < head_[blocks[chosen].pos]) chosen = static_cast<std::size_t>(&b - blocks.data());
            }
        } else {
            double limit = kInf;
            for (const auto& b : blocks) limit = std::min(limit, b.relaxed);
            double best_pivot = 0.0;
            for (std::size_t k = 0; k < blocks.size(); ++k) {
                if (blocks[k].ratio > limit) continue;
                const double piv = std::abs(alpha[blocks[k].pos]);
                if (piv > best_pivot) {
                    best_pivot = piv;
                    chosen = k;
                }
            }
        }
        const Block& b = blocks[chosen];
        if (std::isfinite(own_range) && own_range <= b.ratio) {
            flip = true;
            step = own_range;
            return true;
        }
        leave = b.pos;
        step = b.ratio;
        leave_to_upper = b.to_upper;
        flip = false;
        return true;
    }

    const LinearProgram& lp_;
    SimplexOptions opt_;
    std::size_t n_ = 0, m_ = 0, total_ = 0;

    std::vector<std::size_t> col_start_, col_row_;
    std::vector<double> col_val_;

    std::vector<double> lo_, hi_, cost_, phase_cost_, x_, d_, edge_weight_;
    std::vector<VarState> state_;
    std::vector<std::size_t> head_, basis_pos_;

    KluFactor lu_;
    std::vector<unsigned char> rejected_;
    bool rejected_any_ = false;
    bool allow_small_pivot_ = false;
    std::vector<Eta> etas_;
};

}  // namespace

SimplexResult solve(const LinearProgram& program, const SimplexOptions& options) {
    for (std::size_t j = 0; j < program.num_variables(); ++j)
        if (program.lower()[j] > program.upper()[j]) {
            SimplexResult r;
            r.status = SimplexStatus::Infeasible;
            r.x.assign(program.num_variables(), 0.0);
            return r;
        }
    if (program.num_rows() == 0) {
        // Every variable sits at whichever bound its objective prefers.
        SimplexResult r;
        r.status = SimplexStatus::Optimal;
        for (std::size_t j = 0; j < program.num_variables(); ++j) {
            const double c = program.objective()[j];
            double v = c > 0 ? program.upper()[j] : c < 0 ? program.lower()[j] : std::max(program.lower()[j], std::min(0.0, program.upper()[j]));
            if (!std::isfinite(v)) {
                if (c != 0.0) {
                    r.status = SimplexStatus::Unbounded;
                    v = 0.0;
                } else {
                    v = std::isfinite(program.lower()[j]) ? program.lower()[j] : std::isfinite(program.upper()[j]) ? program.upper()[j] : 0.0;
                }
            }
            r.x.push_back(v);
            r.objective += c * v;
        }
        return r;
    }
    Solver solver(program, options);
    return solver.run();
}

}  // namespace atlas::lp
