#pragma once

#include "avlag/analysis.hpp"
#include "avlag/problem.hpp"

namespace avlag {

struct CheckResult {
    std::string name;
    bool ok = true;
    std::string detail;
};

// Everything the pipeline establishes about one problem.
struct AnalysisOutcome {
    StructureData S;
    RankInfo rank;
    HolonomicSector H;
    Classification C;
    std::optional<GaugeSymmetry> G;
    ReducedDynamics D;
    std::optional<SymMatrix> poisson_inv; // Type I only
    std::vector<CheckResult> checks;
    std::vector<std::string> warnings;
    bool all_ok = true;
};

namespace detail {

inline Json json_strings(const std::vector<Expr>& v)
{
    Json a = Json::array();
    for (const auto& e : v)
        a.push_back(to_string(e));
    return a;
}

inline Json json_matrix(const SymMatrix& M)
{
    Json rows = Json::array();
    for (int i = 0; i < M.rows; ++i) {
        Json r = Json::array();
        for (int j = 0; j < M.cols; ++j)
            r.push_back(to_string(M.at(i, j)));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline Json json_basis(const std::vector<std::vector<Expr>>& basis)
{
    Json a = Json::array();
    for (const auto& v : basis)
        a.push_back(json_strings(v));
    return a;
}

} // namespace detail

// Canonical report: nlohmann::json objects keep keys sorted, so dump() is
// byte-deterministic for a fixed outcome.
inline Json build_report(const Problem& P, const AnalysisOutcome& O,
                         const ProbeContext& ctx)
{
    const SymbolTable& T = *P.table;
    Json r;
    r["problem"] = P.spec_echo;

    r["structure"]["A"] = detail::json_matrix(O.S.A);
    r["structure"]["omega"] = detail::json_strings(O.S.omega);
    r["rank"] = O.rank.rank;
    Json locus = Json::array();
    for (const auto& e : O.rank.degeneracy_locus)
        locus.push_back(to_string(e));
    r["degeneracy_locus"] = std::move(locus);
    r["kernel"] = detail::json_basis(O.H.kernel);

    Json cons;
    cons["primary"] = detail::json_strings(primary_constraints(O.S, T));
    Json hol = Json::array(), sec = Json::array();
    for (const auto& phi : distinct_holonomic(O.H)) {
        hol.push_back(to_string(phi));
        sec.push_back(to_string(total_time_derivative(phi, 0)));
    }
    cons["holonomic"] = std::move(hol);
    cons["secondary"] = std::move(sec);
    r["constraints"] = std::move(cons);

    Json cls;
    cls["tag"] = class_name(O.C.tag);
    cls["both_witnesses"] = O.C.both_witnesses;
    Json wit;
    if (O.C.has_ii1)
        wit["Z"] = detail::json_strings(O.C.Z);
    if (O.C.has_ii2) {
        wit["Y"] = detail::json_strings(O.C.Y);
        wit["Ybar"] = detail::json_strings(O.C.Ybar);
        wit["phi_Y"] = to_string(O.C.phi_Y);
    }
    if (O.C.tag == ClassTag::TypeII3 && O.C.residual)
        wit["residual"] = to_string(O.C.residual);
    cls["witnesses"] = std::move(wit);
    r["classification"] = std::move(cls);

    if (O.G) {
        Json g;
        g["R"] = O.G->R;
        g["X0"] = detail::json_strings(O.G->X0);
        g["X1"] = detail::json_strings(O.G->X1);
        g["F0"] = to_string(O.G->F0);
        g["F1"] = to_string(O.G->F1);
        r["gauge"] = std::move(g);
    }

    Json dyn;
    if (O.D.error)
        dyn["error"] = *O.D.error;
    if (O.D.eta) {
        dyn["type"] = "eta";
        dyn["drift"] = detail::json_strings(O.D.eta->drift);
    } else if (O.D.sode) {
        dyn["type"] = "constrained_sode";
        dyn["velocity"] = detail::json_strings(O.D.sode->velocity);
        dyn["acceleration"] = detail::json_strings(O.D.sode->acceleration);
        dyn["kernel_directions"] = detail::json_basis(O.D.sode->kernel_directions);
        Json ff = Json::array();
        for (const Symbol* s : O.D.sode->free_functions)
            ff.push_back(s->name);
        dyn["free_functions"] = std::move(ff);
        dyn["manifold"] = detail::json_strings(O.D.sode->manifold);
    }
    r["dynamics"] = std::move(dyn);

    if (O.poisson_inv) {
        Json p;
        for (int i = 0; i < T.dimension(); ++i)
            for (int j = i + 1; j < T.dimension(); ++j)
                p["{" + T.coordinate(i)->name + "," + T.coordinate(j)->name +
                  "}"] = to_string(O.poisson_inv->at(i, j));
        r["poisson"] = std::move(p);
    }

    Json checks;
    Json list = Json::array();
    for (const auto& c : O.checks) {
        Json e;
        e["name"] = c.name;
        e["ok"] = c.ok;
        if (!c.detail.empty())
            e["detail"] = c.detail;
        list.push_back(std::move(e));
    }
    checks["list"] = std::move(list);
    checks["probabilistic_count"] = ctx.probabilistic_count;
    Json notes = Json::array();
    for (const auto& s : ctx.probabilistic_notes)
        notes.push_back(s);
    checks["probabilistic"] = std::move(notes);
    checks["seed"] = ctx.cfg.seed;
    r["checks"] = std::move(checks);

    Json warn = Json::array();
    for (const auto& w : O.warnings)
        warn.push_back(w);
    r["warnings"] = std::move(warn);
    return r;
}

} // namespace avlag
