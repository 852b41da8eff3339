#pragma once

#include "avlag/expr.hpp"

namespace avlag {

// Partial derivative with respect to a single symbol.
inline Expr differentiate(const Expr& e, const Symbol* s)
{
    switch (e->kind) {
    case NodeKind::Num:
        return zero();
    case NodeKind::Sym:
        return e->sym == s ? one() : zero();
    case NodeKind::Add: {
        std::vector<Expr> ks;
        ks.reserve(e->kids.size());
        for (const auto& k : e->kids)
            ks.push_back(differentiate(k, s));
        return add(std::move(ks));
    }
    case NodeKind::Mul: {
        // Leibniz rule over the factor list.
        std::vector<Expr> terms;
        terms.reserve(e->kids.size());
        for (std::size_t i = 0; i < e->kids.size(); ++i) {
            Expr di = differentiate(e->kids[i], s);
            if (is_zero_num(di))
                continue;
            std::vector<Expr> fs;
            fs.reserve(e->kids.size());
            for (std::size_t j = 0; j < e->kids.size(); ++j)
                fs.push_back(i == j ? di : e->kids[j]);
            terms.push_back(mul(std::move(fs)));
        }
        return add(std::move(terms));
    }
    case NodeKind::Pow: {
        Expr db = differentiate(e->kids[0], s);
        if (is_zero_num(db))
            return zero();
        return mul({num(e->value), pow(e->kids[0], e->value - 1), db});
    }
    case NodeKind::Fun: {
        const Expr& u = e->kids[0];
        Expr du = differentiate(u, s);
        if (is_zero_num(du))
            return zero();
        switch (e->tag) {
        case FunTag::Ln:
            return div(du, u);
        case FunTag::Exp:
            return mul(e, du);
        case FunTag::Sin:
            return mul(cos_of(u), du);
        case FunTag::Cos:
            return neg(mul(sin_of(u), du));
        }
    }
    }
    return zero();
}

// Total time derivative along the jet chain: t contributes the explicit
// partial, coordinates differentiate to velocities, velocities (order 1
// only) to accelerations, and the gauge jet chain is g -> gdot -> gddot.
// Parameters are constants.
//
// order 0 rejects velocity dependence; order 1 introduces accelerations.
inline Expr total_time_derivative(const Expr& e, int order)
{
    if (order != 0 && order != 1)
        throw Error("total_time_derivative: order must be 0 or 1");
    std::vector<Expr> terms;
    for (const Symbol* s : free_symbols(e)) {
        switch (s->kind) {
        case SymbolKind::Time:
            terms.push_back(differentiate(e, s));
            break;
        case SymbolKind::Coordinate:
        case SymbolKind::Jet:
            if (!s->dot)
                throw Error("total time derivative exceeds the jet chain at '" +
                            s->name + "'");
            terms.push_back(mul(var(s->dot), differentiate(e, s)));
            break;
        case SymbolKind::Velocity:
            if (order < 1)
                throw Error("velocity symbol '" + s->name +
                            "' requires a first-order total derivative");
            terms.push_back(mul(var(s->dot), differentiate(e, s)));
            break;
        case SymbolKind::Acceleration:
            throw Error("acceleration symbol '" + s->name +
                        "' in total time derivative input");
        case SymbolKind::Parameter:
            break;
        case SymbolKind::Momentum:
        case SymbolKind::FreeFunction:
            throw Error("total time derivative undefined for symbol '" + s->name +
                        "'");
        }
    }
    return add(std::move(terms));
}

} // namespace avlag
