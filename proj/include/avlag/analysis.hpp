#pragma once

#include "avlag/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace avlag {

// ---------------------------------------------------------------------------
// Holonomic sector: directions Y annihilating A, each carrying the
// configuration-space constraint omega . Y = 0.

struct HolonomicSector {
    std::vector<std::vector<Expr>> kernel; // basis of { Y : A_ij Y^i = 0 }
    std::vector<Expr> constraints;         // canonical omega.Y per direction
    std::vector<bool> identically_zero;    // constraint vanishes identically
};

inline HolonomicSector holonomic_sector(const StructureData& S, ProbeContext& ctx)
{
    HolonomicSector H;
    H.kernel = nullspace_basis(S.A, ctx);
    for (const auto& Y : H.kernel) {
        Expr phi = canonicalize_constraint(dot(S.omega, Y));
        H.constraints.push_back(phi);
        H.identically_zero.push_back(is_zero(phi, ctx).zero());
    }
    return H;
}

// The nonvanishing holonomic constraints with duplicates removed (distinct
// kernel directions can carry the same canonical constraint).
inline std::vector<Expr> distinct_holonomic(const HolonomicSector& H)
{
    std::vector<Expr> phis;
    for (std::size_t k = 0; k < H.constraints.size(); ++k) {
        if (H.identically_zero[k])
            continue;
        bool dup = false;
        for (const auto& p : phis)
            dup = dup || equal(p, H.constraints[k]);
        if (!dup)
            phis.push_back(H.constraints[k]);
    }
    return phis;
}

// ---------------------------------------------------------------------------
// Classification.

enum class ClassTag { TypeI, TypeII1, TypeII2, TypeII3 };

inline const char* class_name(ClassTag t)
{
    switch (t) {
    case ClassTag::TypeI: return "TypeI";
    case ClassTag::TypeII1: return "TypeII1";
    case ClassTag::TypeII2: return "TypeII2";
    case ClassTag::TypeII3: return "TypeII3";
    }
    return "?";
}

struct Classification {
    ClassTag tag = ClassTag::TypeI;
    std::vector<Expr> Z;       // II.1: A_ij Z^i = 0 and omega.Z = 0
    std::vector<Expr> Y, Ybar; // II.2: chi_Y = Phi_Ybar
    Expr phi_Y;                // II.2: the constraint behind chi_Y (= -omega.Y)
    Expr residual;             // II.3: obstruction left over by the search
    bool has_ii1 = false;
    bool has_ii2 = false;
    bool both_witnesses = false;
};

// Nearest rational with small denominator; used to lift numerically fitted
// coefficients before exact verification.
inline std::optional<Rational> rationalize(double x, long long max_den = 1000000)
{
    if (!std::isfinite(x))
        return std::nullopt;
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    for (int iter = 0; iter < 64; ++iter) {
        double fl = std::floor(v);
        if (fl > 9e17 || fl < -9e17)
            return std::nullopt;
        long long a = static_cast<long long>(fl);
        long long h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_den || k2 <= 0)
            break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <=
            1e-9 * std::max(1.0, std::abs(x)))
            return Rational(h1, k1);
        double frac = v - fl;
        if (frac < 1e-12)
            break;
        v = 1.0 / frac;
    }
    return std::nullopt;
}

namespace detail {

// Fits rational constants c_k with target + sum c_k basis_k = 0 by sampling
// and least squares, then certifies the combination symbolically.  Returns
// nothing when no certified combination exists.
inline std::optional<std::vector<Rational>>
rational_combination(const Expr& target, const std::vector<Expr>& basis,
                     ProbeContext& ctx)
{
    const int k = static_cast<int>(basis.size());
    if (k == 0)
        return std::nullopt;
    std::set<const Symbol*> syms = free_symbols(target);
    for (const auto& e : basis)
        collect_symbols(e, syms);
    std::vector<const Symbol*> symbols(syms.begin(), syms.end());
    std::sort(symbols.begin(), symbols.end(),
              [](const Symbol* a, const Symbol* b) { return a->name < b->name; });

    std::uint64_t seed = ctx.cfg.seed ^ (target->hash * 0x9e3779b97f4a7c15ULL);
    for (const auto& e : basis)
        seed = detail::combine(seed, e->hash);
    std::mt19937_64 rng(seed);

    const int rows = k + 3;
    Eigen::MatrixXd M(rows, k);
    Eigen::VectorXd b(rows);
    EvalPolicy probe{1e-8};
    Bindings pt;
    int good = 0, attempts = 0;
    while (good < rows && attempts < 100 * rows) {
        ++attempts;
        for (const Symbol* s : symbols)
            pt.set(s, draw_symbol_value(rng, s));
        try {
            double tv = eval2(target, pt, probe).value;
            for (int j = 0; j < k; ++j)
                M(good, j) = eval2(basis[j], pt, probe).value;
            b(good) = -tv;
        } catch (const EvalError& err) {
            if (err.kind == EvalErrorKind::Unbound)
                throw;
            continue;
        }
        ++good;
    }
    if (good < rows)
        return std::nullopt;
    Eigen::VectorXd c = M.colPivHouseholderQr().solve(b);
    std::vector<Rational> cs;
    cs.reserve(k);
    for (int j = 0; j < k; ++j) {
        auto r = rationalize(c(j), 4096);
        if (!r)
            return std::nullopt;
        cs.push_back(*r);
    }
    std::vector<Expr> combo{target};
    for (int j = 0; j < k; ++j)
        combo.push_back(mul(num(cs[j]), basis[j]));
    if (!is_zero(add(std::move(combo)), ctx).zero())
        return std::nullopt;
    return cs;
}

} // namespace detail

// Decides which of the four cases the structure data falls into and returns
// the witnesses.  When both a Type II.1 and a Type II.2 witness exist, the
// tag records II.1 and both_witnesses is set.
inline Classification classify(const StructureData& S, const HolonomicSector& H,
                               const SymbolTable& T, ProbeContext& ctx)
{
    Classification C;
    if (H.kernel.empty()) {
        C.tag = ClassTag::TypeI;
        return C;
    }
    const int n = S.A.rows;

    // II.1: kernel direction annihilating omega as well -- the right kernel
    // of A^T stacked with the omega row.
    SymMatrix B(n + 1, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            B.at(i, j) = S.A.at(j, i);
    for (int j = 0; j < n; ++j)
        B.at(n, j) = S.omega[j];
    auto zs = null_right(B, ctx);
    if (!zs.empty()) {
        C.has_ii1 = true;
        C.Z = zs[0];
    }

    // II.2: some chi_Y must be expressible as a primary constraint Phi_Ybar.
    // Ybar solves Ybar^T A = d(phi_Y)/dq; the leftover q-dependent part may
    // be absorbed by shifting Ybar along the kernel.
    std::vector<Expr> kernel_phis;
    kernel_phis.reserve(H.kernel.size());
    for (const auto& Yk : H.kernel)
        kernel_phis.push_back(neg(dot(S.omega, Yk)));

    SymMatrix At = S.A.transposed();
    for (std::size_t k = 0; k < H.kernel.size() && !C.has_ii2; ++k) {
        const Expr& phiY = kernel_phis[k];
        if (is_zero(phiY, ctx).zero())
            continue;
        std::vector<Expr> grad(n, zero());
        for (int j = 0; j < n; ++j)
            grad[j] = differentiate(phiY, T.coordinate(j));
        LinearSolution sol = solve_linear(At, grad, ctx);
        if (!sol.consistent) {
            if (!C.residual)
                C.residual = sol.residual;
            continue;
        }
        std::vector<Expr> Ybar = sol.particular;
        Expr c0 = dot(S.omega, Ybar);
        if (T.has_time())
            c0 = add(c0, differentiate(phiY, T.time()));
        if (!is_zero(c0, ctx).zero()) {
            auto cs = detail::rational_combination(c0, kernel_phis, ctx);
            if (!cs) {
                if (!C.residual)
                    C.residual = c0;
                continue;
            }
            for (std::size_t j = 0; j < H.kernel.size(); ++j)
                for (int i = 0; i < n; ++i)
                    Ybar[i] = add(Ybar[i], mul(num((*cs)[j]), H.kernel[j][i]));
        }
        C.has_ii2 = true;
        C.Y = H.kernel[k];
        for (auto& e : Ybar)
            e = simplified(e);
        C.Ybar = Ybar;
        C.phi_Y = phiY;
    }

    if (C.has_ii1) {
        C.tag = ClassTag::TypeII1;
        C.both_witnesses = C.has_ii2;
    } else if (C.has_ii2) {
        C.tag = ClassTag::TypeII2;
    } else {
        C.tag = ClassTag::TypeII3;
    }
    return C;
}

// ---------------------------------------------------------------------------
// Gauge symmetries X_g = g X0 + gdot X1 with Noether function
// F_g = g F0 + gdot F1.

struct GaugeSymmetry {
    int R = 0; // highest derivative of the gauge parameter appearing in X_g
    std::vector<Expr> X0, X1;
    Expr F0 = zero(), F1 = zero();
};

inline std::optional<GaugeSymmetry> gauge_symmetry(const AffineLagrangian& L,
                                                   const Classification& C)
{
    GaugeSymmetry G;
    const int n = L.n();
    switch (C.tag) {
    case ClassTag::TypeII1:
        G.R = 0;
        G.X0 = C.Z;
        G.X1.assign(n, zero());
        G.F0 = simplified(dot(L.m, C.Z));
        G.F1 = zero();
        return G;
    case ClassTag::TypeII2:
        G.R = 1;
        G.X0 = C.Ybar;
        G.X1 = C.Y;
        G.F0 = simplified(add(C.phi_Y, dot(L.m, C.Ybar)));
        G.F1 = simplified(dot(L.m, C.Y));
        return G;
    default:
        return std::nullopt;
    }
}

struct GaugeVerdict {
    bool ok = true;
    std::string failed; // which identity broke
    Expr witness;       // the non-vanishing expression
};

// Checks X^(1)_g L = d F_g / dt identically in (t, q, v) and in the gauge
// jets, plus the Noether identity <EL, X0> - d/dt <EL, X1> = 0.
inline GaugeVerdict verify_gauge(const AffineLagrangian& L, const GaugeSymmetry& G,
                                 ProbeContext& ctx)
{
    SymbolTable& T = *L.table;
    const Symbol* g = T.jet(0);
    const Symbol* gd = T.jet(1);
    const Symbol* gdd = T.jet(2);
    const int n = L.n();

    Expr Lx = lagrangian_expr(L);
    std::vector<Expr> terms;
    for (int i = 0; i < n; ++i) {
        Expr xi = add(mul(var(g), G.X0[i]), mul(var(gd), G.X1[i]));
        terms.push_back(mul(xi, differentiate(Lx, T.coordinate(i))));
        terms.push_back(mul(total_time_derivative(xi, 0), L.m[i]));
    }
    Expr XL = add(std::move(terms));
    Expr Fg = add(mul(var(g), G.F0), mul(var(gd), G.F1));
    Expr D = sub(XL, total_time_derivative(Fg, 0));

    auto check = [&](const Expr& e, const char* what) -> std::optional<GaugeVerdict> {
        if (is_zero(e, ctx).zero())
            return std::nullopt;
        return GaugeVerdict{false, what, e};
    };

    // D is linear in (g, gdot, gddot); each coefficient must vanish.
    if (auto bad = check(differentiate(D, g), "gauge coefficient of g"))
        return *bad;
    if (auto bad = check(differentiate(D, gd), "gauge coefficient of gdot"))
        return *bad;
    if (auto bad = check(differentiate(D, gdd), "gauge coefficient of gddot"))
        return *bad;
    SubstMap nojet{{g, zero()}, {gd, zero()}, {gdd, zero()}};
    if (auto bad = check(substitute(D, nojet), "gauge jet-free part"))
        return *bad;

    std::vector<Expr> del = variational_derivatives(L);
    Expr noe = sub(dot(del, G.X0), total_time_derivative(dot(del, G.X1), 1));
    if (auto bad = check(noe, "noether identity"))
        return *bad;
    return {};
}

// ---------------------------------------------------------------------------
// Reduced dynamics.

struct EtaField {
    std::vector<Expr> drift; // eta = d/dt + drift^i d/dq^i, drift = A^{-1} omega
};

struct ConstrainedSODE {
    std::vector<Expr> velocity;     // qdot components on the manifold
    std::vector<Expr> acceleration; // vdot components; may carry C1, C2, ...
    std::vector<std::vector<Expr>> kernel_directions;
    std::vector<const Symbol*> free_functions;
    std::vector<Expr> manifold;     // primary + holonomic + secondary
};

struct ReducedDynamics {
    ClassTag tag = ClassTag::TypeI;
    std::optional<EtaField> eta;
    std::optional<ConstrainedSODE> sode;
    std::optional<std::string> error; // propagated inconsistency, if any
};

namespace detail {

// d/dt + v.d/dq applied to a (t, q, v)-level constraint, leaving the
// velocities alone (no acceleration terms).
inline Expr drag_along_velocities(const Expr& c, const SymbolTable& T)
{
    std::vector<Expr> terms;
    if (T.has_time())
        terms.push_back(differentiate(c, T.time()));
    for (int j = 0; j < T.dimension(); ++j)
        terms.push_back(mul(var(T.velocity(j)), differentiate(c, T.coordinate(j))));
    return add(std::move(terms));
}

// Solves a system affine in the symbols xs, yielding the pivot substitution
// map and the leftover residual rows.  affine is false when some constraint
// is nonlinear in xs; the caller decides how strict to be.
struct AffineReduction {
    bool affine = true;
    SubstMap subst;
    std::vector<Expr> residuals;
};

inline AffineReduction affine_reduction(const std::vector<Expr>& cons,
                                        const std::vector<const Symbol*>& xs,
                                        ProbeContext& ctx)
{
    AffineReduction out;
    const int n = static_cast<int>(xs.size());
    SubstMap at_zero;
    for (const Symbol* x : xs)
        at_zero[x] = zero();
    SymMatrix W(static_cast<int>(cons.size()), n + 1);
    for (std::size_t i = 0; i < cons.size(); ++i) {
        for (int j = 0; j < n; ++j) {
            Expr cj = differentiate(cons[i], xs[static_cast<std::size_t>(j)]);
            for (const Symbol* x : xs)
                if (depends_on(cj, x)) {
                    out.affine = false;
                    return out;
                }
            W.at(static_cast<int>(i), j) = cj;
        }
        W.at(static_cast<int>(i), n) = neg(substitute(cons[i], at_zero));
    }
    RrefResult rr = rref(std::move(W), n, ctx);
    for (int i = rr.rank; i < static_cast<int>(cons.size()); ++i)
        out.residuals.push_back(rr.R.at(i, n));
    for (int j = 0; j < n; ++j) {
        int pr = rr.pivot_row_of_col[j];
        if (pr < 0)
            continue;
        std::vector<Expr> e{rr.R.at(pr, n)};
        for (int f = 0; f < n; ++f)
            if (rr.pivot_row_of_col[f] < 0)
                e.push_back(neg(mul(rr.R.at(pr, f),
                                    var(xs[static_cast<std::size_t>(f)]))));
        out.subst[xs[static_cast<std::size_t>(j)]] = add(std::move(e));
    }
    return out;
}

} // namespace detail

inline ReducedDynamics reduced_dynamics(const AffineLagrangian& L,
                                        const StructureData& S,
                                        const HolonomicSector& H,
                                        const Classification& C, ProbeContext& ctx)
{
    SymbolTable& T = *L.table;
    const int n = L.n();
    ReducedDynamics D;
    D.tag = C.tag;

    if (C.tag == ClassTag::TypeI) {
        LinearSolution sol = solve_linear(S.A, S.omega, ctx);
        if (!sol.consistent || !sol.kernel.empty()) {
            D.error = "regular structure matrix failed to invert";
            return D;
        }
        for (auto& e : sol.particular)
            e = simplified(e);
        D.eta = EtaField{sol.particular};
        return D;
    }

    // Velocity-level system: the primary constraints stacked with the time
    // derivatives of the distinct holonomic constraints.
    std::vector<Expr> primary = primary_constraints(S, T);
    std::vector<Expr> phis = distinct_holonomic(H);

    // Residuals of the stacked systems are only required to vanish on the
    // constraint manifold; reduce them by the holonomic part when it is
    // affine in the coordinates.
    std::vector<const Symbol*> coords(T.coordinates());
    detail::AffineReduction hred = detail::affine_reduction(phis, coords, ctx);
    SubstMap qsub = hred.affine ? hred.subst : SubstMap{};

    const int rows = n + static_cast<int>(phis.size());
    SymMatrix Mv(rows, n);
    std::vector<Expr> rhs_v(rows, zero());
    std::vector<Expr> constraint_of_row(rows);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            Mv.at(i, j) = S.A.at(i, j);
        rhs_v[i] = S.omega[i];
        constraint_of_row[i] = primary[i];
    }
    std::vector<Expr> secondary;
    for (std::size_t k = 0; k < phis.size(); ++k) {
        int r = n + static_cast<int>(k);
        for (int j = 0; j < n; ++j)
            Mv.at(r, j) = differentiate(phis[k], T.coordinate(j));
        rhs_v[r] = T.has_time() ? neg(differentiate(phis[k], T.time())) : zero();
        Expr chi = total_time_derivative(phis[k], 0);
        secondary.push_back(chi);
        constraint_of_row[r] = chi;
    }

    SymMatrix Wv(rows, n + 1);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < n; ++j)
            Wv.at(i, j) = Mv.at(i, j);
        Wv.at(i, n) = rhs_v[i];
    }
    RrefResult rv = rref(std::move(Wv), n, ctx);
    for (int i = rv.rank; i < rows; ++i) {
        Expr res = substitute(rv.R.at(i, n), qsub);
        if (!is_zero(res, ctx).zero()) {
            D.error = "velocity system is inconsistent on the manifold: "
                      "residual " +
                      to_string(res) + " (tertiary constraint)";
            return D;
        }
    }

    ConstrainedSODE G;
    G.velocity.assign(n, zero());
    SubstMap vsub;
    for (int j = 0; j < n; ++j) {
        int pr = rv.pivot_row_of_col[j];
        if (pr < 0) {
            G.velocity[j] = var(T.velocity(j));
            continue;
        }
        std::vector<Expr> e{rv.R.at(pr, n)};
        for (int f = 0; f < n; ++f)
            if (rv.pivot_row_of_col[f] < 0)
                e.push_back(neg(mul(rv.R.at(pr, f), var(T.velocity(f)))));
        G.velocity[j] = simplified(add(std::move(e)));
        vsub[T.velocity(j)] = G.velocity[j];
    }

    // Acceleration level: drag each velocity-level constraint along the flow
    // and solve the same linear system for the vdot components.
    SymMatrix Wa(rows, n + 1);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < n; ++j)
            Wa.at(i, j) = Mv.at(i, j);
        Expr u = detail::drag_along_velocities(constraint_of_row[i], T);
        Wa.at(i, n) = neg(substitute(substitute(u, vsub), qsub));
    }
    RrefResult ra = rref(std::move(Wa), n, ctx);
    for (int i = ra.rank; i < rows; ++i) {
        Expr res = substitute(ra.R.at(i, n), qsub);
        if (!is_zero(res, ctx).zero()) {
            D.error = "acceleration system is inconsistent on the manifold: "
                      "residual " +
                      to_string(res);
            return D;
        }
    }
    G.kernel_directions = kernel_from_rref(ra, n);
    for (std::size_t k = 0; k < G.kernel_directions.size(); ++k)
        G.free_functions.push_back(T.free_function(static_cast<int>(k)));
    G.acceleration.assign(n, zero());
    for (int j = 0; j < n; ++j) {
        std::vector<Expr> e;
        int pr = ra.pivot_row_of_col[j];
        if (pr >= 0)
            e.push_back(ra.R.at(pr, n));
        for (std::size_t k = 0; k < G.kernel_directions.size(); ++k)
            e.push_back(mul(var(G.free_functions[k]), G.kernel_directions[k][j]));
        G.acceleration[j] = simplified(add(std::move(e)));
    }

    G.manifold = primary;
    for (const auto& p : phis)
        G.manifold.push_back(p);
    for (const auto& c : secondary)
        G.manifold.push_back(c);
    for (auto& c : G.manifold)
        c = simplified(c);
    D.sode = std::move(G);
    return D;
}

// ---------------------------------------------------------------------------
// Poisson structure of the regular case.

struct PoissonStructure {
    SymMatrix inv; // (A^{-1})^{jk}
};

// Throws SingularMatrixError when A is not invertible (non-TypeI input).
inline PoissonStructure poisson_structure(const StructureData& S, ProbeContext& ctx)
{
    SymMatrix inv = inverse(S.A, ctx);
    for (int i = 0; i < inv.rows; ++i)
        for (int j = 0; j < inv.cols; ++j)
            inv.at(i, j) = simplified(inv.at(i, j));
    return {std::move(inv)};
}

inline Expr poisson_bracket(const PoissonStructure& P, const Expr& f, const Expr& g,
                            const SymbolTable& T)
{
    std::vector<Expr> terms;
    for (int j = 0; j < T.dimension(); ++j) {
        Expr fj = differentiate(f, T.coordinate(j));
        if (is_zero_num(fj))
            continue;
        for (int k = 0; k < T.dimension(); ++k)
            terms.push_back(
                mul({P.inv.at(j, k), fj, differentiate(g, T.coordinate(k))}));
    }
    return add(std::move(terms));
}

// ---------------------------------------------------------------------------
// Candidate verification: does a proposed constrained SODE preserve its own
// manifold and restrict to a second-order field?

struct CandidateVerdict {
    bool ok = true;
    std::string what;
    Expr witness;
};

inline CandidateVerdict verify_candidate_dynamics(const AffineLagrangian& L,
                                                  const ConstrainedSODE& G,
                                                  ProbeContext& ctx)
{
    SymbolTable& T = *L.table;
    const int n = L.n();
    if (static_cast<int>(G.velocity.size()) != n ||
        static_cast<int>(G.acceleration.size()) != n)
        throw InputError("candidate dynamics has wrong dimension");

    // Split the manifold into velocity-level and configuration-level parts.
    std::vector<Expr> vlevel, hol;
    for (const auto& c : G.manifold) {
        if (depends_on_kind(c, SymbolKind::Velocity))
            vlevel.push_back(c);
        else
            hol.push_back(c);
    }

    // Configuration substitution, available when the configuration-level
    // constraints are affine in the coordinates.
    std::vector<const Symbol*> coords(T.coordinates());
    detail::AffineReduction hred = detail::affine_reduction(hol, coords, ctx);
    SubstMap qsub = hred.affine ? hred.subst : SubstMap{};
    for (const auto& res : hred.residuals)
        if (!is_zero(res, ctx).zero())
            return {false, "configuration constraints are inconsistent", res};

    // Velocity substitution: solve the affine velocity-level system.
    std::vector<const Symbol*> vels;
    for (int j = 0; j < n; ++j)
        vels.push_back(T.velocity(j));
    detail::AffineReduction vred = detail::affine_reduction(vlevel, vels, ctx);
    if (!vred.affine)
        return {false, "constraint is not affine in the velocities",
                vlevel.empty() ? zero() : vlevel[0]};
    const SubstMap& vsub = vred.subst;

    auto reduce = [&](const Expr& e) {
        return substitute(substitute(e, vsub), qsub);
    };

    // Velocity-system residual rows must vanish on the manifold.
    for (const auto& r : vred.residuals) {
        Expr res = substitute(r, qsub);
        if (!is_zero(res, ctx).zero())
            return {false, "velocity-level constraints are inconsistent", res};
    }

    // The field must be second order on the manifold...
    for (int j = 0; j < n; ++j) {
        Expr d = reduce(sub(G.velocity[j], var(T.velocity(j))));
        if (!is_zero(d, ctx).zero())
            return {false, "field is not second order along coordinate " +
                               T.coordinate(j)->name,
                    d};
    }

    // ...and must drag every manifold constraint to zero.
    for (const auto& c : G.manifold) {
        std::vector<Expr> terms;
        if (T.has_time())
            terms.push_back(differentiate(c, T.time()));
        for (int j = 0; j < n; ++j) {
            terms.push_back(mul(G.velocity[j], differentiate(c, T.coordinate(j))));
            terms.push_back(mul(G.acceleration[j], differentiate(c, T.velocity(j))));
        }
        Expr drag = reduce(add(std::move(terms)));
        if (!is_zero(drag, ctx).zero())
            return {false, "constraint is not preserved: " + to_string(c), drag};
    }
    return {};
}

} // namespace avlag
