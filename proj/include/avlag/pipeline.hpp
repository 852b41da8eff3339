#pragma once

#include "avlag/report.hpp"

namespace avlag {

namespace detail {

inline void run_check(std::vector<CheckResult>& out, const std::string& name,
                      ProbeContext& ctx, const std::vector<Expr>& must_vanish)
{
    CheckResult c{name, true, {}};
    for (const auto& e : must_vanish) {
        ZeroVerdict v = is_zero(e, ctx);
        if (!v.zero()) {
            c.ok = false;
            c.detail = "nonzero: " + to_string(e);
            break;
        }
    }
    out.push_back(std::move(c));
}

} // namespace detail

// Runs the full analysis: structure data, rank and degeneracy locus,
// holonomic sector, classification, gauge symmetry, reduced dynamics,
// Poisson structure (regular case), and the internal verification suite.
inline AnalysisOutcome run_analysis(const Problem& P, ProbeContext& ctx)
{
    const AffineLagrangian& L = P.lag;
    SymbolTable& T = *P.table;
    const int n = L.n();

    AnalysisOutcome O;
    O.S = structure_matrices(L);
    O.rank = rank_info(O.S.A, ctx);
    O.H = holonomic_sector(O.S, ctx);
    O.C = classify(O.S, O.H, T, ctx);
    O.G = gauge_symmetry(L, O.C);
    O.D = reduced_dynamics(L, O.S, O.H, O.C, ctx);
    if (O.C.tag == ClassTag::TypeI)
        O.poisson_inv = poisson_structure(O.S, ctx).inv;

    // --- verification suite -------------------------------------------------
    auto& checks = O.checks;

    {
        std::vector<Expr> v;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                v.push_back(add(O.S.A.at(i, j), O.S.A.at(j, i)));
        detail::run_check(checks, "A_antisymmetric", ctx, v);
    }
    {
        // dA = 0 componentwise: cyclic sum of coordinate derivatives.
        std::vector<Expr> v;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    v.push_back(add(
                        {differentiate(O.S.A.at(i, j), T.coordinate(k)),
                         differentiate(O.S.A.at(j, k), T.coordinate(i)),
                         differentiate(O.S.A.at(k, i), T.coordinate(j))}));
        detail::run_check(checks, "A_closed", ctx, v);
    }
    {
        // Euler-Lagrange consistency: delta_i = -Phi_i.
        std::vector<Expr> primary = primary_constraints(O.S, T);
        std::vector<Expr> del = variational_derivatives(L);
        std::vector<Expr> v;
        for (int i = 0; i < n; ++i)
            v.push_back(add(primary[i], del[i]));
        detail::run_check(checks, "euler_lagrange_matches_primary", ctx, v);
    }
    {
        std::vector<Expr> v;
        for (const auto& Y : O.H.kernel)
            for (int j = 0; j < n; ++j) {
                std::vector<Expr> terms;
                for (int i = 0; i < n; ++i)
                    terms.push_back(mul(O.S.A.at(i, j), Y[i]));
                v.push_back(add(std::move(terms)));
            }
        detail::run_check(checks, "kernel_annihilates_A", ctx, v);
    }
    {
        // The canonical brackets of the momentum constraints reproduce A.
        LegendreData ld = legendre_constraints(L);
        std::vector<Expr> v;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                v.push_back(sub(ld.bracket.at(i, j), O.S.A.at(i, j)));
        detail::run_check(checks, "legendre_brackets_match_A", ctx, v);
    }

    if (O.C.tag == ClassTag::TypeI) {
        checks.push_back({"dimension_even_for_type_i", n % 2 == 0,
                          n % 2 == 0 ? "" : "odd-dimensional regular case"});
        {
            std::vector<Expr> v;
            std::vector<Expr> Ad = matvec(O.S.A, O.D.eta ? O.D.eta->drift
                                                         : std::vector<Expr>(n, zero()));
            for (int i = 0; i < n; ++i)
                v.push_back(sub(Ad[i], O.S.omega[i]));
            detail::run_check(checks, "drift_solves_structure_equation", ctx, v);
        }
        if (O.poisson_inv) {
            const SymMatrix& Pm = *O.poisson_inv;
            std::vector<Expr> v;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    for (int k = j + 1; k < n; ++k) {
                        std::vector<Expr> terms;
                        for (int l = 0; l < n; ++l) {
                            terms.push_back(mul(
                                Pm.at(i, l),
                                differentiate(Pm.at(j, k), T.coordinate(l))));
                            terms.push_back(mul(
                                Pm.at(j, l),
                                differentiate(Pm.at(k, i), T.coordinate(l))));
                            terms.push_back(mul(
                                Pm.at(k, l),
                                differentiate(Pm.at(i, j), T.coordinate(l))));
                        }
                        v.push_back(add(std::move(terms)));
                    }
            detail::run_check(checks, "poisson_jacobi_identity", ctx, v);
        }
    }

    if (O.G) {
        GaugeVerdict gv = verify_gauge(L, *O.G, ctx);
        checks.push_back({"gauge_and_noether_identities", gv.ok,
                          gv.ok ? ""
                                : gv.failed + ": " + to_string(gv.witness)});
    }

    if (O.D.sode) {
        CandidateVerdict cv = verify_candidate_dynamics(L, *O.D.sode, ctx);
        checks.push_back({"dynamics_preserve_manifold", cv.ok,
                          cv.ok ? ""
                                : cv.what + ": " + to_string(cv.witness)});
    }

    if (O.D.error && O.C.tag != ClassTag::TypeII3)
        checks.push_back({"reduced_dynamics_constructed", false, *O.D.error});

    // --- warnings ------------------------------------------------------------
    if (!O.rank.degeneracy_locus.empty()) {
        std::string w = "analysis valid away from the degeneracy locus of:";
        for (const auto& e : O.rank.degeneracy_locus)
            w += " " + to_string(e);
        O.warnings.push_back(std::move(w));
    }
    if (O.C.both_witnesses)
        O.warnings.push_back(
            "both a II.1 and a II.2 witness exist; tagged by the first case");
    if (O.C.tag == ClassTag::TypeII3)
        O.warnings.push_back("no gauge symmetry exists for this Lagrangian");
    if (O.D.error)
        O.warnings.push_back("reduced dynamics: " + *O.D.error);

    O.all_ok = true;
    for (const auto& c : checks)
        O.all_ok = O.all_ok && c.ok;
    return O;
}

} // namespace avlag
