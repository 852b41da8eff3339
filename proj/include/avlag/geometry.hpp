#pragma once

#include "avlag/calculus.hpp"
#include "avlag/linalg.hpp"

#include <string>
#include <vector>

namespace avlag {

// First-order Lagrangian L = m_i(t,q) v^i - V(t,q), i.e. the one-form
// m_i dq^i - V dt evaluated on lifted curves.  Autonomous problems carry
// the same data with no explicit time dependence.
struct AffineLagrangian {
    SymbolTable* table = nullptr;
    std::vector<Expr> m;
    Expr V = zero();
    bool autonomous = false;

    int n() const { return static_cast<int>(m.size()); }
};

inline void validate_form(const AffineLagrangian& L)
{
    if (!L.table)
        throw InputError("one-form has no symbol table");
    if (L.n() != L.table->dimension())
        throw InputError("one-form has " + std::to_string(L.n()) +
                         " velocity coefficients for " +
                         std::to_string(L.table->dimension()) + " coordinates");
    auto check = [&L](const Expr& e, const std::string& what) {
        for (const Symbol* s : free_symbols(e)) {
            switch (s->kind) {
            case SymbolKind::Time:
            case SymbolKind::Coordinate:
            case SymbolKind::Parameter:
                break;
            default:
                throw InputError(what + " depends on '" + s->name +
                                 "'; coefficients must be functions of time, "
                                 "coordinates and parameters");
            }
        }
        if (L.autonomous && L.table->has_time() &&
            depends_on(e, L.table->time()))
            throw InputError("autonomous problem, but " + what +
                             " depends on time");
    };
    for (int i = 0; i < L.n(); ++i)
        check(L.m[i], "m[" + std::to_string(i) + "]");
    check(L.V, "V");
}

inline AffineLagrangian make_affine(SymbolTable& table, std::vector<Expr> m, Expr V,
                                    bool autonomous)
{
    AffineLagrangian L{&table, std::move(m), std::move(V), autonomous};
    validate_form(L);
    return L;
}

inline Expr lagrangian_expr(const AffineLagrangian& L)
{
    std::vector<Expr> terms;
    terms.reserve(L.m.size() + 1);
    for (int i = 0; i < L.n(); ++i)
        terms.push_back(mul(L.m[i], var(L.table->velocity(i))));
    terms.push_back(neg(L.V));
    return add(std::move(terms));
}

// ---------------------------------------------------------------------------
// Structure data.

struct StructureData {
    SymMatrix A;             // A_ij = dm_j/dq^i - dm_i/dq^j
    std::vector<Expr> omega; // omega_i = dV/dq^i + dm_i/dt
};

inline StructureData structure_matrices(const AffineLagrangian& L)
{
    const SymbolTable& T = *L.table;
    int n = L.n();
    StructureData S{SymMatrix(n, n), std::vector<Expr>(n, zero())};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            S.A.at(i, j) = sub(differentiate(L.m[j], T.coordinate(i)),
                               differentiate(L.m[i], T.coordinate(j)));
    for (int i = 0; i < n; ++i) {
        Expr w = differentiate(L.V, T.coordinate(i));
        if (T.has_time())
            w = add(w, differentiate(L.m[i], T.time()));
        S.omega[i] = w;
    }
    return S;
}

// Primary constraints Phi_i = A_ij v^j - omega_i; vanishing on solutions.
inline std::vector<Expr> primary_constraints(const StructureData& S,
                                             const SymbolTable& T)
{
    int n = S.A.rows;
    std::vector<Expr> phi(n, zero());
    for (int i = 0; i < n; ++i) {
        std::vector<Expr> terms;
        for (int j = 0; j < n; ++j)
            terms.push_back(mul(S.A.at(i, j), var(T.velocity(j))));
        terms.push_back(neg(S.omega[i]));
        phi[i] = add(std::move(terms));
    }
    return phi;
}

// Euler-Lagrange expressions d/dt(dL/dv^i) - dL/dq^i; these equal -Phi_i.
inline std::vector<Expr> variational_derivatives(const AffineLagrangian& L)
{
    Expr Lx = lagrangian_expr(L);
    std::vector<Expr> out;
    out.reserve(L.m.size());
    for (int i = 0; i < L.n(); ++i)
        out.push_back(sub(total_time_derivative(L.m[i], 0),
                          differentiate(Lx, L.table->coordinate(i))));
    return out;
}

// ---------------------------------------------------------------------------
// The Hamiltonian bridge: phase space (q^1..q^m, p^1..p^m) as configuration
// space with m = (p, 0) and V = H recovers Hamilton's equations.
inline AffineLagrangian from_hamiltonian(SymbolTable& table, const Expr& H, int pairs)
{
    if (pairs <= 0 || table.dimension() != 2 * pairs)
        throw InputError("hamiltonian problem needs exactly 2*pairs coordinates");
    std::vector<Expr> m;
    m.reserve(2 * pairs);
    for (int i = 0; i < pairs; ++i)
        m.push_back(var(table.coordinate(pairs + i)));
    for (int i = 0; i < pairs; ++i)
        m.push_back(zero());
    bool autonomous = !(table.has_time() && depends_on(H, table.time()));
    return make_affine(table, std::move(m), H, autonomous);
}

// ---------------------------------------------------------------------------
// Multiplier extensions enforcing holonomic constraints phi_a(t, q) = 0.

enum class MultiplierMode {
    Values,     // L' = L + z^a phi_a        (multipliers enter undifferentiated)
    Velocities, // L' = L + zdot^a phi_a     (multipliers enter through velocities)
};

inline AffineLagrangian extend_with_multipliers(const AffineLagrangian& L,
                                                const std::vector<Expr>& phis,
                                                MultiplierMode mode)
{
    SymbolTable& T = *L.table;
    for (const auto& phi : phis)
        for (const Symbol* s : free_symbols(phi))
            if (s->kind != SymbolKind::Time && s->kind != SymbolKind::Coordinate &&
                s->kind != SymbolKind::Parameter)
                throw InputError("multiplier constraint depends on '" + s->name +
                                 "'");
    AffineLagrangian ext;
    ext.table = &T;
    ext.m = L.m;
    ext.V = L.V;
    ext.autonomous = false; // extension may mix time in through phi
    int k = static_cast<int>(phis.size());
    std::vector<const Symbol*> lams;
    for (int a = 0; a < k; ++a)
        lams.push_back(T.add_coordinate("lam" + std::to_string(a + 1)));
    if (mode == MultiplierMode::Values) {
        ext.m.resize(L.n() + k, zero());
        Expr V = ext.V;
        for (int a = 0; a < k; ++a)
            V = sub(V, mul(var(lams[a]), phis[a])); // L' = L + z^a phi_a
        ext.V = V;
    } else {
        for (int a = 0; a < k; ++a)
            ext.m.push_back(phis[a]); // coefficient of the multiplier velocity
    }
    validate_form(ext);
    return ext;
}

// ---------------------------------------------------------------------------
// Legendre picture: primary constraints p_j - m_j on extended phase space,
// with canonical brackets {p_j - m_j, p_k - m_k} reproducing A_jk.

inline Expr canonical_bracket(const Expr& f, const Expr& g, SymbolTable& T)
{
    std::vector<Expr> terms;
    for (int i = 0; i < T.dimension(); ++i) {
        const Symbol* q = T.coordinate(i);
        const Symbol* p = T.momentum(i);
        terms.push_back(mul(differentiate(f, q), differentiate(g, p)));
        terms.push_back(neg(mul(differentiate(f, p), differentiate(g, q))));
    }
    return add(std::move(terms));
}

struct LegendreData {
    std::vector<Expr> constraints; // p_j - m_j
    SymMatrix bracket;             // pairwise canonical brackets
};

inline LegendreData legendre_constraints(const AffineLagrangian& L)
{
    SymbolTable& T = *L.table;
    int n = L.n();
    LegendreData out;
    out.constraints.reserve(n);
    for (int j = 0; j < n; ++j)
        out.constraints.push_back(sub(var(T.momentum(j)), L.m[j]));
    out.bracket = SymMatrix(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            out.bracket.at(j, k) =
                canonical_bracket(out.constraints[j], out.constraints[k], T);
    return out;
}

// Shift by an exact form: m_i += dF/dq^i, V -= dF/dt.  Leaves the structure
// data (A, omega) unchanged; used to generate equivalent problems.
inline AffineLagrangian add_exact_form(const AffineLagrangian& L, const Expr& F)
{
    AffineLagrangian out = L;
    for (int i = 0; i < L.n(); ++i)
        out.m[i] = add(out.m[i], differentiate(F, L.table->coordinate(i)));
    if (L.table->has_time())
        out.V = sub(out.V, differentiate(F, L.table->time()));
    out.autonomous =
        L.autonomous && !(L.table->has_time() && depends_on(F, L.table->time()));
    validate_form(out);
    return out;
}

} // namespace avlag
