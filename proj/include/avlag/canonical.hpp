#pragma once

#include "avlag/expr.hpp"

#include <map>
#include <vector>

namespace avlag {

namespace detail {

// Records, per power base, the largest inverse power appearing among the
// top-level factors of a term.
inline void denominator_needs(const Expr& term,
                              std::map<Expr, Rational, ExprLess>& need)
{
    auto scan = [&need](const Expr& f) {
        if (f->kind == NodeKind::Pow && f->value < 0) {
            Rational k = -f->value;
            Rational& cur = need[f->kids[0]];
            if (k > cur)
                cur = k;
        }
    };
    if (term->kind == NodeKind::Mul) {
        for (const auto& k : term->kids)
            scan(k);
    } else {
        scan(term);
    }
}

inline void collect_term_coefficients(const Expr& e, std::vector<Rational>& out)
{
    if (e->kind == NodeKind::Add) {
        for (const auto& t : e->kids)
            out.push_back(term_split(t).first);
    } else {
        out.push_back(term_split(e).first);
    }
}

inline Rational leading_coefficient(const Expr& e)
{
    if (e->kind == NodeKind::Add)
        return term_split(e->kids[0]).first;
    return term_split(e).first;
}

// Multiplies every term by the factor list separately: a term's own inverse
// powers cancel against the matching factor inside mul()'s exponent ledger,
// so no denominator survives for expand() to chase through a distribution.
inline Expr lift_terms(const Expr& e, const std::vector<Expr>& fs)
{
    auto lift = [&fs](const Expr& t) {
        std::vector<Expr> prod = fs;
        prod.push_back(t);
        return mul(std::move(prod));
    };
    if (e->kind != NodeKind::Add)
        return lift(e);
    std::vector<Expr> ts;
    ts.reserve(e->kids.size());
    for (const auto& t : e->kids)
        ts.push_back(lift(t));
    return add(std::move(ts));
}

// Multiplies by a rational constant, distributing over sums so the result
// keeps an explicit term list.
inline Expr scale_terms(const Expr& e, const Rational& c)
{
    if (c == 1)
        return e;
    if (e->kind == NodeKind::Add) {
        std::vector<Expr> ts;
        ts.reserve(e->kids.size());
        for (const auto& t : e->kids)
            ts.push_back(mul(num(c), t));
        return add(std::move(ts));
    }
    return mul(num(c), e);
}

} // namespace detail

// Multiplies away every denominator found among the top-level factors of
// the terms, distributing the product so none survive structurally.
inline Expr clear_denominators(const Expr& e)
{
    std::map<Expr, Rational, ExprLess> need;
    if (e->kind == NodeKind::Add) {
        for (const auto& t : e->kids)
            detail::denominator_needs(t, need);
    } else {
        detail::denominator_needs(e, need);
    }
    if (need.empty())
        return e;
    std::vector<Expr> fs;
    for (const auto& [base, k] : need)
        fs.push_back(pow(base, k));
    return expand(detail::lift_terms(e, fs));
}

// Canonical representative of the ray through a constraint: denominators
// cleared, rational content divided out, leading coefficient positive.
inline Expr canonicalize_constraint(const Expr& e)
{
    Expr c = clear_denominators(normalize(e));
    if (is_zero_num(c))
        return c;
    std::vector<Rational> coeffs;
    detail::collect_term_coefficients(c, coeffs);
    Rational scale = Rational(1) / rational_content(coeffs);
    if (detail::leading_coefficient(c) < 0)
        scale = -scale;
    return detail::scale_terms(c, scale);
}

// Same, applied uniformly to a vector: one common scaling for all entries,
// sign fixed by the first structurally nonzero entry.
inline std::vector<Expr> canonicalize_vector(const std::vector<Expr>& v)
{
    std::map<Expr, Rational, ExprLess> need;
    for (const auto& e : v) {
        if (e->kind == NodeKind::Add) {
            for (const auto& t : e->kids)
                detail::denominator_needs(t, need);
        } else {
            detail::denominator_needs(e, need);
        }
    }
    std::vector<Expr> out = v;
    if (!need.empty()) {
        std::vector<Expr> fs;
        for (const auto& [base, k] : need)
            fs.push_back(pow(base, k));
        for (auto& e : out)
            e = expand(detail::lift_terms(e, fs));
    }
    std::vector<Rational> coeffs;
    for (const auto& e : out)
        detail::collect_term_coefficients(e, coeffs);
    Rational scale = Rational(1) / rational_content(coeffs);
    for (const auto& e : out) {
        if (!is_zero_num(e)) {
            if (detail::leading_coefficient(e) < 0)
                scale = -scale;
            break;
        }
    }
    for (auto& e : out)
        e = detail::scale_terms(e, scale);
    return out;
}

} // namespace avlag
