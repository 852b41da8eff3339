#pragma once

#include "avlag/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace avlag {

enum class EvalErrorKind { Unbound, Domain, NearSingular, NonFinite };

struct EvalError : Error {
    EvalError(EvalErrorKind k, const std::string& what) : Error(what), kind(k) {}
    EvalErrorKind kind;
};

// Point in evaluation space, indexed by symbol uid.
class Bindings {
public:
    Bindings() = default;
    explicit Bindings(std::size_t n) : vals_(n, 0.0), bound_(n, 0) {}

    void set(const Symbol* s, double v)
    {
        if (s->uid >= vals_.size()) {
            vals_.resize(s->uid + 1, 0.0);
            bound_.resize(s->uid + 1, 0);
        }
        vals_[s->uid] = v;
        bound_[s->uid] = 1;
    }

    void unset(const Symbol* s)
    {
        if (s->uid < bound_.size())
            bound_[s->uid] = 0;
    }

    bool has(const Symbol* s) const
    {
        return s->uid < bound_.size() && bound_[s->uid];
    }

    double get(const Symbol* s) const
    {
        if (!has(s))
            throw EvalError(EvalErrorKind::Unbound,
                            "unbound symbol '" + s->name + "'");
        return vals_[s->uid];
    }

private:
    std::vector<double> vals_;
    std::vector<char> bound_;
};

struct EvalPolicy {
    // Denominators (and bases of negative powers) smaller than this fail.
    double min_denom = 1e-300;
};

struct EvalPair {
    double value;
    double magnitude; // cancellation-free scale estimate of the same tree
};

namespace detail {

inline EvalPair eval2(const Expr& e, const Bindings& b, const EvalPolicy& policy)
{
    auto finite = [](double v) {
        if (!std::isfinite(v))
            throw EvalError(EvalErrorKind::NonFinite, "non-finite value");
        return v;
    };
    switch (e->kind) {
    case NodeKind::Num: {
        double v = to_double(e->value);
        return {v, std::abs(v)};
    }
    case NodeKind::Sym: {
        double v = b.get(e->sym);
        return {v, std::abs(v)};
    }
    case NodeKind::Add: {
        double v = 0, m = 0;
        for (const auto& k : e->kids) {
            EvalPair p = eval2(k, b, policy);
            v += p.value;
            m += p.magnitude;
        }
        return {finite(v), finite(m)};
    }
    case NodeKind::Mul: {
        double v = 1, m = 1;
        for (const auto& k : e->kids) {
            EvalPair p = eval2(k, b, policy);
            v *= p.value;
            m *= p.magnitude;
        }
        return {finite(v), finite(m)};
    }
    case NodeKind::Pow: {
        EvalPair base = eval2(e->kids[0], b, policy);
        double ex = to_double(e->value);
        if (!is_integer(e->value)) {
            if (base.value < 0)
                throw EvalError(EvalErrorKind::Domain,
                                "fractional power of a negative base");
            if (base.value < policy.min_denom && ex < 0)
                throw EvalError(EvalErrorKind::NearSingular,
                                "near-singular fractional power");
        } else if (ex < 0 && std::abs(base.value) < policy.min_denom) {
            throw EvalError(EvalErrorKind::NearSingular, "near-zero denominator");
        }
        double v = finite(std::pow(base.value, ex));
        double m = ex > 0 ? std::pow(base.magnitude, ex) : std::abs(v);
        return {v, finite(m)};
    }
    case NodeKind::Fun: {
        EvalPair arg = eval2(e->kids[0], b, policy);
        double v = 0;
        switch (e->tag) {
        case FunTag::Ln:
            if (arg.value <= 0)
                throw EvalError(EvalErrorKind::Domain, "ln of a non-positive value");
            v = std::log(arg.value);
            break;
        case FunTag::Exp:
            v = std::exp(arg.value);
            break;
        case FunTag::Sin:
            v = std::sin(arg.value);
            break;
        case FunTag::Cos:
            v = std::cos(arg.value);
            break;
        }
        return {finite(v), std::abs(v)};
    }
    }
    throw EvalError(EvalErrorKind::Domain, "unreachable node kind");
}

} // namespace detail

inline double eval_at(const Expr& e, const Bindings& b)
{
    return detail::eval2(e, b, EvalPolicy{}).value;
}

inline double eval_at(const Expr& e, const std::map<const Symbol*, double>& point)
{
    Bindings b;
    for (const auto& [s, v] : point)
        b.set(s, v);
    return eval_at(e, b);
}

// ---------------------------------------------------------------------------
// Randomized zero testing.

struct ProbeConfig {
    std::uint64_t seed = 0;
    int points = 16;
    double tol = 1e-9;
};

// Shared across one analysis: configuration plus a tally of every verdict
// that rests on sampling rather than on structural cancellation.
struct ProbeContext {
    ProbeConfig cfg;
    int probabilistic_count = 0;
    std::vector<std::string> probabilistic_notes;

    void note_probabilistic(const Expr& e)
    {
        ++probabilistic_count;
        if (probabilistic_notes.size() < 64)
            probabilistic_notes.push_back(to_string(e));
    }
};

struct DomainExhaustedError : Error {
    using Error::Error;
};

// Log-uniform on [0.1, 10] for positive symbols, uniform on [-3, 3]
// otherwise; nonzero symbols are redrawn away from the origin.
inline double draw_symbol_value(std::mt19937_64& rng, const Symbol* s)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (s->assumption == Assumption::Positive) {
        double lo = std::log(0.1), hi = std::log(10.0);
        return std::exp(lo + (hi - lo) * u(rng));
    }
    double v = -3.0 + 6.0 * u(rng);
    if (s->assumption == Assumption::Nonzero) {
        int guard = 0;
        while (std::abs(v) < 0.1 && guard++ < 64)
            v = -3.0 + 6.0 * u(rng);
    }
    return v;
}

struct ZeroVerdict {
    enum class Kind { StructuralZero, ProbabilisticZero, NonZero };
    Kind kind = Kind::StructuralZero;
    std::vector<std::pair<const Symbol*, double>> witness; // NonZero only
    double value = 0.0;

    bool zero() const { return kind != Kind::NonZero; }
    bool structural() const { return kind == Kind::StructuralZero; }
};

// Decides whether an expression vanishes identically.  Structural zeros are
// certified by normalization or by expand-and-collect; everything else is
// probed at cfg.points random admissible points with relative tolerance
// cfg.tol against a cancellation-free magnitude of the same tree.  The
// probe point stream depends only on (seed, salt, expression), never on
// call order, so analyses are reproducible.
inline ZeroVerdict is_zero(const Expr& e, ProbeContext& ctx, std::uint64_t salt = 0)
{
    if (is_zero_num(e))
        return {};
    if (is_num(e))
        return {ZeroVerdict::Kind::NonZero, {}, to_double(e->value)};
    Expr ex = expand(e);
    if (is_zero_num(ex))
        return {};

    std::set<const Symbol*> syms = free_symbols(e);
    std::vector<const Symbol*> symbols(syms.begin(), syms.end());
    std::sort(symbols.begin(), symbols.end(),
              [](const Symbol* a, const Symbol* b) { return a->name < b->name; });

    std::uint64_t seed = ctx.cfg.seed;
    seed ^= static_cast<std::uint64_t>(e->hash) * 0x9e3779b97f4a7c15ULL;
    seed ^= (salt + 1) * 0xd6e8feb86659fd93ULL;
    std::mt19937_64 rng(seed);

    EvalPolicy probe{1e-8};
    Bindings b;
    int good = 0, attempts = 0;
    const int limit = 100 * ctx.cfg.points;
    while (good < ctx.cfg.points && attempts < limit) {
        ++attempts;
        for (const Symbol* s : symbols)
            b.set(s, draw_symbol_value(rng, s));
        EvalPair p{};
        try {
            p = detail::eval2(e, b, probe);
        } catch (const EvalError& err) {
            if (err.kind == EvalErrorKind::Unbound)
                throw;
            continue; // inadmissible point; resample
        }
        double scale = std::max(1.0, p.magnitude);
        if (std::abs(p.value) > ctx.cfg.tol * scale) {
            ZeroVerdict v;
            v.kind = ZeroVerdict::Kind::NonZero;
            v.value = p.value;
            for (const Symbol* s : symbols)
                v.witness.emplace_back(s, b.get(s));
            return v;
        }
        ++good;
    }
    if (good < ctx.cfg.points)
        throw DomainExhaustedError(
            "domain exhausted while probing '" + to_string(e) + "' (" +
            std::to_string(attempts) + " attempts)");
    ctx.note_probabilistic(e);
    return {ZeroVerdict::Kind::ProbabilisticZero, {}, 0.0};
}

} // namespace avlag
