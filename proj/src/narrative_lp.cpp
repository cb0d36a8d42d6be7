#include "atlas/narrative_lp.hpp"

#include "atlas/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace atlas {

const char* to_string(ConstraintClass c) {
    switch (c) {
        case ConstraintClass::MinEdge: return "minedge";
        case ConstraintClass::Activation: return "activation";
        case ConstraintClass::Route: return "route";
        case ConstraintClass::Anchor: return "anchor";
        case ConstraintClass::Length: return "length";
        case ConstraintClass::Coverage: return "coverage";
        case ConstraintClass::Acceptance: return "acceptance";
    }
    return "unknown";
}

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::UnboundedGuard: return "unbounded-guard";
    }
    return "unknown";
}

std::size_t LpModel::count_rows(ConstraintClass c) const {
    return static_cast<std::size_t>(std::count(row_class.begin(), row_class.end(), c));
}

namespace {

using lp::kInf;
using Term = lp::LinearProgram::Term;

struct Families {
    bool coverage = true;
    bool acceptance = true;
};

// Fills model.program and model.row_class from the semantic fields.
void assemble(LpModel& m, Families families) {
    m.program = lp::LinearProgram{};
    m.row_class.clear();
    auto& p = m.program;
    const std::size_t n = m.num_events;
    const std::size_t E = m.edges.size();
    const std::size_t k = m.num_clusters;

    m.minedge_var = p.add_variable(0.0, 1.0, 1.0);
    m.first_event_var = p.num_variables();
    for (std::size_t i = 0; i < n; ++i) p.add_variable(0.0, 1.0);
    m.first_edge_var = p.num_variables();
    for (std::size_t e = 0; e < E; ++e) p.add_variable(0.0, 1.0);
    m.first_cluster_var = p.num_variables();
    for (std::size_t c = 0; c < k; ++c) p.add_variable(0.0, 1.0);

    auto row = [&](ConstraintClass cls, std::vector<Term> terms, double lo, double hi) {
        p.add_row(std::move(terms), lo, hi);
        m.row_class.push_back(cls);
    };
    const auto ev = [&](std::size_t i) { return m.first_event_var + i; };
    const auto ed = [&](std::size_t e) { return m.first_edge_var + e; };

    for (std::size_t e = 0; e < E; ++e)
        row(ConstraintClass::MinEdge, {{m.minedge_var, 1.0}, {ed(e), 1.0 - m.edges[e].strength}}, -kInf, 1.0);

    for (std::size_t e = 0; e < E; ++e) {
        row(ConstraintClass::Activation, {{ev(m.edges[e].source), 1.0}, {ed(e), -1.0}}, 0.0, kInf);
        row(ConstraintClass::Activation, {{ev(m.edges[e].target), 1.0}, {ed(e), -1.0}}, 0.0, kInf);
    }

    std::vector<std::vector<std::size_t>> in(n), out(n);
    for (std::size_t e = 0; e < E; ++e) {
        out[m.edges[e].source].push_back(e);
        in[m.edges[e].target].push_back(e);
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (j == m.start) continue;
        std::vector<Term> t{{ev(j), 1.0}};
        for (auto e : in[j]) t.push_back({ed(e), -1.0});
        row(ConstraintClass::Route, std::move(t), -kInf, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i == m.end) continue;
        std::vector<Term> t{{ev(i), 1.0}};
        for (auto e : out[i]) t.push_back({ed(e), -1.0});
        row(ConstraintClass::Route, std::move(t), -kInf, 0.0);
    }

    row(ConstraintClass::Anchor, {{ev(m.start), 1.0}}, 1.0, 1.0);
    row(ConstraintClass::Anchor, {{ev(m.end), 1.0}}, 1.0, 1.0);

    {
        std::vector<Term> t;
        for (std::size_t e = 0; e < E; ++e) t.push_back({ed(e), 1.0});
        row(ConstraintClass::Length, std::move(t), static_cast<double>(m.params.K) - 1.0, kInf);
    }

    if (families.coverage) {
        for (std::size_t c = 0; c < k; ++c) {
            std::vector<Term> t{{m.first_cluster_var + c, 1.0}};
            for (std::size_t e = 0; e < E; ++e)
                if (m.edge_cluster_weight[e][c] != 0.0) t.push_back({ed(e), -m.edge_cluster_weight[e][c]});
            row(ConstraintClass::Coverage, std::move(t), -kInf, 0.0);
        }
        std::vector<Term> t;
        for (std::size_t c = 0; c < k; ++c) t.push_back({m.first_cluster_var + c, 1.0 / static_cast<double>(k)});
        row(ConstraintClass::Coverage, std::move(t), m.params.mincover, kInf);
    }

    if (families.acceptance) {
        std::vector<Term> t;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = m.percentiles[i] - m.params.minscore;
            if (w != 0.0) t.push_back({ev(i), w});
        }
        row(ConstraintClass::Acceptance, std::move(t), 0.0, kInf);
    }
}

LpSolution unpack(const LpModel& m, const lp::SimplexResult& r) {
    LpSolution s;
    s.iterations = r.iterations;
    switch (r.status) {
        case lp::SimplexStatus::Optimal: s.status = LpStatus::Optimal; break;
        case lp::SimplexStatus::Infeasible: s.status = LpStatus::Infeasible; break;
        case lp::SimplexStatus::Unbounded:
        case lp::SimplexStatus::IterationLimit: s.status = LpStatus::UnboundedGuard; break;
    }
    if (s.status != LpStatus::Optimal) return s;
    s.objective = r.objective;
    s.minedge = r.x[m.minedge_var];
    auto slice = [&](std::size_t first, std::size_t count) {
        return std::vector<double>(r.x.begin() + static_cast<std::ptrdiff_t>(first),
                                   r.x.begin() + static_cast<std::ptrdiff_t>(first + count));
    };
    s.events = slice(m.first_event_var, m.num_events);
    s.edges = slice(m.first_edge_var, m.edges.size());
    s.clusters = slice(m.first_cluster_var, m.num_clusters);
    return s;
}

}  // namespace

LpModel build_model(const StrengthGraph& graph, const MembershipMatrix& memberships,
                    const std::vector<double>& percentiles, const ExtractionParams& params) {
    if (params.K < 2) throw Error(ErrorKind::InvalidK, "invalid K " + std::to_string(params.K) + ": must be at least 2");
    if (graph.num_events() < 2) throw Error(ErrorKind::InsufficientEvents, "insufficient events: start and end coincide");
    if (percentiles.size() != graph.num_events())
        throw Error(ErrorKind::UnscoredEvent, "unscored event: percentile table does not match the graph");
    if (!(params.mincover >= 0.0 && params.mincover <= 1.0))
        throw Error(ErrorKind::InvalidConfig, "mincover out of range");
    if (!(params.minscore >= 0.0 && params.minscore <= 1.0))
        throw Error(ErrorKind::InvalidConfig, "minscore out of range");

    LpModel m;
    m.params = params;
    m.num_events = graph.num_events();
    m.num_clusters = memberships.num_clusters;
    m.start = 0;
    m.end = graph.num_events() - 1;
    m.edges = graph.edges;
    m.percentiles = percentiles;
    m.edge_cluster_weight.reserve(m.edges.size());
    for (const auto& e : m.edges) {
        const auto& pi = memberships.of(graph.event_ids[e.source]);
        const auto& pj = memberships.of(graph.event_ids[e.target]);
        std::vector<double> w(m.num_clusters);
        for (std::size_t c = 0; c < m.num_clusters; ++c) w[c] = edge_membership(pi, pj, c);
        m.edge_cluster_weight.push_back(std::move(w));
    }
    assemble(m, {});
    return m;
}

LpSolution solve(const LpModel& model, const lp::SimplexOptions& options) {
    LpSolution s = unpack(model, lp::solve(model.program, options));
    if (s.status != LpStatus::Infeasible) return s;

    // Add families back one at a time to name the one that breaks feasibility.
    LpModel probe = model;
    assemble(probe, {.coverage = false, .acceptance = false});
    if (lp::solve(probe.program, options).status == lp::SimplexStatus::Infeasible) {
        s.infeasible_class = "structure";
        return s;
    }
    assemble(probe, {.coverage = false, .acceptance = true});
    if (lp::solve(probe.program, options).status == lp::SimplexStatus::Infeasible) {
        s.infeasible_class = "acceptance";
        return s;
    }
    assemble(probe, {.coverage = true, .acceptance = false});
    if (lp::solve(probe.program, options).status == lp::SimplexStatus::Infeasible) {
        s.infeasible_class = "coverage";
        return s;
    }
    s.infeasible_class = "coverage+acceptance";
    return s;
}

VerificationReport evaluate_constraints(const LpModel& m, const LpSolution& sol) {
    VerificationReport rep;
    if (sol.status != LpStatus::Optimal) return rep;
    rep.applicable = true;

    auto note = [&](double violation, ConstraintClass cls, const std::string& what) {
        if (violation > rep.max_violation) {
            rep.max_violation = violation;
            rep.worst_class = cls;
            rep.worst_constraint = what;
        }
    };
    auto edge_name = [&](std::size_t e) {
        return "edge[" + std::to_string(m.edges[e].source) + "->" + std::to_string(m.edges[e].target) + "]";
    };
    auto bounds = [&](double v, ConstraintClass cls, const std::string& name) {
        note(-v, cls, name + " >= 0");
        note(v - 1.0, cls, name + " <= 1");
    };

    bounds(sol.minedge, ConstraintClass::MinEdge, "minedge");
    for (std::size_t i = 0; i < m.num_events; ++i) bounds(sol.events[i], ConstraintClass::Activation, "event[" + std::to_string(i) + "]");
    for (std::size_t e = 0; e < m.edges.size(); ++e) bounds(sol.edges[e], ConstraintClass::Activation, edge_name(e));
    for (std::size_t c = 0; c < m.num_clusters; ++c) bounds(sol.clusters[c], ConstraintClass::Coverage, "cluster[" + std::to_string(c) + "]");

    std::vector<double> in_sum(m.num_events, 0.0), out_sum(m.num_events, 0.0);
    double edge_total = 0.0;
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        const auto& ce = m.edges[e];
        const double x = sol.edges[e];
        note(sol.minedge - (1.0 - x + ce.strength * x), ConstraintClass::MinEdge, "C1 minedge vs " + edge_name(e));
        note(x - sol.events[ce.source], ConstraintClass::Activation, "C2 event[" + std::to_string(ce.source) + "] >= " + edge_name(e));
        note(x - sol.events[ce.target], ConstraintClass::Activation, "C2 event[" + std::to_string(ce.target) + "] >= " + edge_name(e));
        out_sum[ce.source] += x;
        in_sum[ce.target] += x;
        edge_total += x;
    }
    for (std::size_t i = 0; i < m.num_events; ++i) {
        if (i != m.start) note(sol.events[i] - in_sum[i], ConstraintClass::Route, "C3 event[" + std::to_string(i) + "] <= inflow");
        if (i != m.end) note(sol.events[i] - out_sum[i], ConstraintClass::Route, "C3 event[" + std::to_string(i) + "] <= outflow");
    }
    note(std::abs(sol.events[m.start] - 1.0), ConstraintClass::Anchor, "C4 start event = 1");
    note(std::abs(sol.events[m.end] - 1.0), ConstraintClass::Anchor, "C4 end event = 1");
    note(static_cast<double>(m.params.K) - 1.0 - edge_total, ConstraintClass::Length, "C5 edge total >= K - 1");

    double cover_total = 0.0;
    for (std::size_t c = 0; c < m.num_clusters; ++c) {
        double presence = 0.0;
        for (std::size_t e = 0; e < m.edges.size(); ++e) presence += m.edge_cluster_weight[e][c] * sol.edges[e];
        note(sol.clusters[c] - presence, ConstraintClass::Coverage, "C6 cluster[" + std::to_string(c) + "] <= presence");
        cover_total += sol.clusters[c];
    }
    if (m.num_clusters > 0)
        note(m.params.mincover - cover_total / static_cast<double>(m.num_clusters), ConstraintClass::Coverage,
             "C6 mean coverage >= mincover");

    double acc = 0.0;
    for (std::size_t i = 0; i < m.num_events; ++i) acc += (m.percentiles[i] - m.params.minscore) * sol.events[i];
    note(-acc, ConstraintClass::Acceptance, "C7 mean percentile >= minscore");

    note(std::abs(sol.objective - sol.minedge), ConstraintClass::MinEdge, "objective equals minedge");
    return rep;
}

VerificationReport verify_solution(const LpModel& model, const LpSolution& solution, double tolerance) {
    VerificationReport rep = evaluate_constraints(model, solution);
    if (rep.applicable && rep.max_violation > tolerance) {
        std::ostringstream msg;
        msg << "solver inconsistency: " << rep.worst_constraint << " violated by " << rep.max_violation;
        throw Error(ErrorKind::SolverInconsistency, msg.str());
    }
    return rep;
}

void write_lp_text(std::ostream& out, const LpModel& m, const std::vector<std::string>& event_ids) {
    const auto& p = m.program;
    std::vector<std::string> names(p.num_variables());
    names[m.minedge_var] = "minedge";
    for (std::size_t i = 0; i < m.num_events; ++i) names[m.first_event_var + i] = "ev" + std::to_string(i);
    for (std::size_t e = 0; e < m.edges.size(); ++e)
        names[m.first_edge_var + e] = "ed" + std::to_string(m.edges[e].source) + "_" + std::to_string(m.edges[e].target);
    for (std::size_t c = 0; c < m.num_clusters; ++c) names[m.first_cluster_var + c] = "cl" + std::to_string(c);

    out << std::setprecision(17);
    out << "\\ narrative extraction program: K=" << m.params.K << " mincover=" << m.params.mincover
        << " minscore=" << m.params.minscore << "\n";
    for (std::size_t i = 0; i < m.num_events && i < event_ids.size(); ++i) out << "\\ ev" << i << " = " << event_ids[i] << "\n";
    out << "Maximize\n obj: minedge\nSubject To\n";

    std::vector<std::size_t> counter(7, 0);
    for (std::size_t r = 0; r < p.num_rows(); ++r) {
        const auto& row = p.rows()[r];
        const auto cls = m.row_class[r];
        out << ' ' << to_string(cls) << '_' << counter[static_cast<std::size_t>(cls)]++ << ':';
        bool first = true;
        for (const auto& t : row.terms) {
            if (!first || t.coef < 0) out << (t.coef < 0 ? " - " : " + ");
            else out << ' ';
            first = false;
            double a = std::abs(t.coef);
            if (a != 1.0) out << a << ' ';
            out << names[t.var];
        }
        if (row.terms.empty()) out << " 0 ev0";
        if (row.lower == row.upper) out << " = " << row.lower;
        else if (std::isfinite(row.lower)) out << " >= " << row.lower;
        else out << " <= " << row.upper;
        out << '\n';
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < p.num_variables(); ++j)
        out << ' ' << p.lower()[j] << " <= " << names[j] << " <= " << p.upper()[j] << '\n';
    out << "End\n";
}

}  // namespace atlas
