#pragma once

// Shared fixtures for the test suite: the worked examples from the report
// output, plus small utilities for randomized property checks.

#include "avlag/avlag.hpp"

#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace avlag::testing {

struct Example {
    std::unique_ptr<SymbolTable> table;
    AffineLagrangian lag;

    SymbolTable& T() { return *table; }
    Expr parse(const std::string& text) const
    {
        return parse_expression(text, *table);
    }
};

inline ProbeContext make_ctx(std::uint64_t seed = 0)
{
    ProbeContext ctx;
    ctx.cfg.seed = seed;
    return ctx;
}

// Planar predator-prey system in Hamiltonian disguise: Type I, bracket
// {x,y} = xy, Hamiltonian a ln y + b ln x - x - y.
inline Example lotka_volterra()
{
    Example e;
    e.table = std::make_unique<SymbolTable>();
    e.table->add_coordinate("x", Assumption::Positive);
    e.table->add_coordinate("y", Assumption::Positive);
    e.table->add_parameter("a", Assumption::Positive);
    e.table->add_parameter("b", Assumption::Positive);
    std::vector<Expr> m = {e.parse("ln(y)/(2*x)"), e.parse("-ln(x)/(2*y)")};
    Expr V = e.parse("a*ln(y) + b*ln(x) - x - y");
    e.lag = make_affine(*e.table, std::move(m), V, true);
    return e;
}

// Four coordinates, constant regular structure matrix: Type I.
inline Example linear_type_i()
{
    Example e;
    e.table = std::make_unique<SymbolTable>();
    for (const char* n : {"q1", "q2", "q3", "q4"})
        e.table->add_coordinate(n);
    std::vector<Expr> m = {e.parse("(q2 + q3)/2"), e.parse("-q1/2"),
                           e.parse("(q4 - q1)/2"), e.parse("-q3/2")};
    Expr V = e.parse("q2*q3 + q3^2/2 + q4^2/2");
    e.lag = make_affine(*e.table, std::move(m), V, true);
    return e;
}

// Dependent holonomic constraints: Type II.1 with gauge ray (2, 0, 1, 1).
inline Example type_ii1()
{
    Example e;
    e.table = std::make_unique<SymbolTable>();
    for (const char* n : {"q1", "q2", "q3", "q4"})
        e.table->add_coordinate(n);
    std::vector<Expr> m = {zero(), e.parse("q1"), e.parse("q2"), e.parse("q2")};
    Expr V = e.parse("q2*(q4 - q3)");
    e.lag = make_affine(*e.table, std::move(m), V, true);
    return e;
}

// Secondary constraint that is primary: Type II.2 with R = 1 gauge.
inline Example type_ii2()
{
    Example e;
    e.table = std::make_unique<SymbolTable>();
    for (const char* n : {"q1", "q2", "q3"})
        e.table->add_coordinate(n);
    std::vector<Expr> m = {e.parse("q2 - q3"), zero(), e.parse("-q2")};
    Expr V = e.parse("(q2 - q1)*q3");
    e.lag = make_affine(*e.table, std::move(m), V, true);
    return e;
}

// Time-dependent Type II.2 instance with degeneracy locus t + 1.
inline Example type_ii2_time()
{
    Example e;
    e.table = std::make_unique<SymbolTable>();
    e.table->add_time("t");
    for (const char* n : {"q1", "q2", "q3"})
        e.table->add_coordinate(n);
    std::vector<Expr> m = {e.parse("t*q2"), e.parse("-q1"), zero()};
    Expr V = e.parse("(q1 - (t + 1)*q2)*q3");
    e.lag = make_affine(*e.table, std::move(m), V, false);
    return e;
}

// No gauge symmetry: Type II.3, still with unique consistent dynamics.
inline Example type_ii3()
{
    Example e;
    e.table = std::make_unique<SymbolTable>();
    for (const char* n : {"q1", "q2", "q3"})
        e.table->add_coordinate(n);
    std::vector<Expr> m = {e.parse("q2 - q3"), zero(), e.parse("q2")};
    Expr V = e.parse("-(q1 - q2)*q3");
    e.lag = make_affine(*e.table, std::move(m), V, true);
    return e;
}

// Canonical harmonic oscillator through the Hamiltonian constructor.
inline Example harmonic()
{
    Example e;
    e.table = std::make_unique<SymbolTable>();
    e.table->add_coordinate("q");
    e.table->add_coordinate("p");
    e.lag = from_hamiltonian(*e.table, e.parse("(p^2 + q^2)/2"), 1);
    return e;
}

// Semantic equality: the canonicalized difference must vanish identically.
// Clearing denominators first turns rational-function identities into
// polynomial ones, which the zero test settles structurally.
inline bool equivalent(const Expr& a, const Expr& b, ProbeContext& ctx)
{
    Expr d = sub(a, b);
    if (is_zero_num(normalize(d)))
        return true;
    return is_zero(canonicalize_constraint(d), ctx).zero();
}

inline bool vanishes(const Expr& a, ProbeContext& ctx)
{
    return is_zero(canonicalize_constraint(a), ctx).zero();
}

// True when v is a (nonzero) constant multiple of ref.
inline bool proportional(const std::vector<Expr>& v, const std::vector<Expr>& ref,
                         ProbeContext& ctx)
{
    if (v.size() != ref.size())
        return false;
    bool nonzero = false;
    for (std::size_t i = 0; i < v.size(); ++i)
        nonzero = nonzero || !is_zero(v[i], ctx).zero();
    if (!nonzero)
        return false;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            Expr cross = sub(mul(v[i], ref[j]), mul(v[j], ref[i]));
            if (!equivalent(cross, zero(), ctx))
                return false;
        }
    return true;
}

// Random multivariate polynomial over the given symbols: up to `terms`
// monomials of degree <= 2 with small integer coefficients.
inline Expr random_polynomial(std::mt19937_64& rng,
                              const std::vector<const Symbol*>& syms, int terms)
{
    std::uniform_int_distribution<int> coeff(-4, 4);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(syms.size()) - 1);
    std::uniform_int_distribution<int> deg(0, 2);
    std::vector<Expr> ts;
    for (int k = 0; k < terms; ++k) {
        int c = coeff(rng);
        if (c == 0)
            c = 1;
        std::vector<Expr> factors{num(static_cast<long>(c))};
        int d = deg(rng);
        for (int i = 0; i < d; ++i)
            factors.push_back(var(syms[static_cast<std::size_t>(pick(rng))]));
        ts.push_back(mul(std::move(factors)));
    }
    return add(std::move(ts));
}

} // namespace avlag::testing
