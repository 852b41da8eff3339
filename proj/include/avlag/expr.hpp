#pragma once

#include "avlag/rational.hpp"
#include "avlag/symbol.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace avlag {

// Expression trees over exact rationals.  Nodes are immutable and shared;
// the building functions below (num, var, add, mul, pow, fn) return
// canonical forms, so two expressions that are equal up to the rewrite
// rules of the normal form compare equal structurally.
//
// Normal form invariants:
//   - Add: flattened, like terms collected, at most one rational term,
//     children ordered by term core (rational term first);
//   - Mul: flattened, at most one leading rational coefficient, factors
//     merged by base with exponents added, ordered by base;
//   - Pow: exponent is an exact rational, never 0 or 1; rational bases
//     with integer exponents are folded; perfect roots are extracted;
//   - Fun: ln/exp/sin/cos with the hard-wired inverse and parity rules.

enum class NodeKind : unsigned char { Num, Sym, Pow, Fun, Mul, Add };
enum class FunTag : unsigned char { Ln, Exp, Sin, Cos };

class Node;
using Expr = std::shared_ptr<const Node>;

class Node {
public:
    NodeKind kind = NodeKind::Num;
    FunTag tag = FunTag::Ln;       // Fun only
    Rational value;                // Num: the constant; Pow: the exponent
    const Symbol* sym = nullptr;   // Sym only
    std::vector<Expr> kids;        // Add/Mul children; Pow base, Fun argument
    std::size_t hash = 0;
};

inline const char* fun_name(FunTag t)
{
    switch (t) {
    case FunTag::Ln: return "ln";
    case FunTag::Exp: return "exp";
    case FunTag::Sin: return "sin";
    case FunTag::Cos: return "cos";
    }
    return "?";
}

namespace detail {

inline std::size_t combine(std::size_t h, std::size_t v)
{
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

inline Expr make_node(NodeKind kind, FunTag tag, Rational value,
                      const Symbol* sym, std::vector<Expr> kids)
{
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->tag = tag;
    n->value = std::move(value);
    n->sym = sym;
    n->kids = std::move(kids);
    std::size_t h = static_cast<std::size_t>(kind) * 0x100000001b3ULL + 1469598103934665603ULL;
    switch (kind) {
    case NodeKind::Num:
        h = combine(h, rational_hash(n->value));
        break;
    case NodeKind::Sym:
        h = combine(h, std::hash<std::string>{}(sym->name));
        break;
    case NodeKind::Pow:
        h = combine(h, rational_hash(n->value));
        h = combine(h, n->kids[0]->hash);
        break;
    case NodeKind::Fun:
        h = combine(h, static_cast<std::size_t>(tag));
        h = combine(h, n->kids[0]->hash);
        break;
    case NodeKind::Mul:
    case NodeKind::Add:
        for (const auto& k : n->kids)
            h = combine(h, k->hash);
        break;
    }
    n->hash = h;
    return n;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Structural total order and equality.

inline int compare(const Expr& a, const Expr& b);

namespace detail {

inline int cmp_rat(const Rational& x, const Rational& y)
{
    if (x < y) return -1;
    if (y < x) return 1;
    return 0;
}

inline int kind_rank(NodeKind k)
{
    switch (k) {
    case NodeKind::Num: return 0;
    case NodeKind::Sym: return 1;
    case NodeKind::Fun: return 2;
    case NodeKind::Mul: return 3;
    case NodeKind::Add: return 4;
    case NodeKind::Pow: return 5; // unreachable: powers compare via their base
    }
    return 6;
}

// View any node as base^exponent; non-powers have exponent 1.
inline std::pair<const Expr*, Rational> pow_view(const Expr& e)
{
    if (e->kind == NodeKind::Pow)
        return {&e->kids[0], e->value};
    return {&e, Rational(1)};
}

} // namespace detail

inline int compare(const Expr& a, const Expr& b)
{
    if (a.get() == b.get())
        return 0;
    auto [ba, ea] = detail::pow_view(a);
    auto [bb, eb] = detail::pow_view(b);
    if (ba->get() != a.get() || bb->get() != b.get()) {
        // At least one side is a power: order by (base, exponent).
        int c = compare(*ba, *bb);
        if (c != 0)
            return c;
        return detail::cmp_rat(ea, eb);
    }
    int ra = detail::kind_rank(a->kind), rb = detail::kind_rank(b->kind);
    if (ra != rb)
        return ra < rb ? -1 : 1;
    switch (a->kind) {
    case NodeKind::Num:
        return detail::cmp_rat(a->value, b->value);
    case NodeKind::Sym:
        return a->sym->name.compare(b->sym->name) < 0
                   ? -1
                   : (a->sym->name == b->sym->name ? 0 : 1);
    case NodeKind::Fun: {
        if (a->tag != b->tag)
            return a->tag < b->tag ? -1 : 1;
        return compare(a->kids[0], b->kids[0]);
    }
    case NodeKind::Mul:
    case NodeKind::Add: {
        std::size_t n = std::min(a->kids.size(), b->kids.size());
        for (std::size_t i = 0; i < n; ++i) {
            int c = compare(a->kids[i], b->kids[i]);
            if (c != 0)
                return c;
        }
        if (a->kids.size() != b->kids.size())
            return a->kids.size() < b->kids.size() ? -1 : 1;
        return 0;
    }
    default:
        return 0;
    }
}

inline bool equal(const Expr& a, const Expr& b)
{
    if (a.get() == b.get())
        return true;
    if (a->hash != b->hash)
        return false;
    return compare(a, b) == 0;
}

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

// ---------------------------------------------------------------------------
// Building blocks.

inline Expr num(Rational v)
{
    return detail::make_node(NodeKind::Num, FunTag::Ln, std::move(v), nullptr, {});
}

inline Expr num(long v) { return num(Rational(v)); }

inline const Expr& zero()
{
    static const Expr e = num(0L);
    return e;
}

inline const Expr& one()
{
    static const Expr e = num(1L);
    return e;
}

inline Expr var(const Symbol* s)
{
    if (!s)
        throw Error("null symbol");
    return detail::make_node(NodeKind::Sym, FunTag::Ln, Rational(0), s, {});
}

inline bool is_num(const Expr& e) { return e->kind == NodeKind::Num; }
inline bool is_zero_num(const Expr& e) { return is_num(e) && e->value == 0; }
inline bool is_one_num(const Expr& e) { return is_num(e) && e->value == 1; }

inline std::optional<Rational> rational_value(const Expr& e)
{
    if (is_num(e))
        return e->value;
    return std::nullopt;
}

inline Expr add(std::vector<Expr> kids);
inline Expr mul(std::vector<Expr> kids);
inline Expr pow(const Expr& base, Rational e);
inline Expr fn(FunTag tag, const Expr& arg);

namespace detail {

inline Expr pow_impl(const Expr& base, const Rational& e);
inline std::pair<Rational, Expr> term_split(const Expr& e);

// Rational content of a sum carrying the sign of its first stored term, and
// the scaled sum itself: base = content * scale_sum(base, 1/content).
inline Rational sum_content(const Expr& s)
{
    std::vector<Rational> cs;
    cs.reserve(s->kids.size());
    for (const auto& k : s->kids)
        cs.push_back(term_split(k).first);
    Rational c = rational_content(cs);
    return cs[0] < 0 ? -c : c;
}

inline Expr scale_sum(const Expr& s, const Rational& c)
{
    std::vector<Expr> ks;
    ks.reserve(s->kids.size());
    for (const auto& k : s->kids)
        ks.push_back(mul({num(c), k}));
    return add(std::move(ks));
}

inline Expr mul_impl(std::vector<Expr> kids)
{
    Rational coeff(1);
    std::map<Expr, Rational, ExprLess> powers;
    std::vector<Expr> work(std::move(kids));
    while (!work.empty()) {
        Expr e = std::move(work.back());
        work.pop_back();
        switch (e->kind) {
        case NodeKind::Num:
            coeff *= e->value;
            if (coeff == 0)
                return zero();
            break;
        case NodeKind::Mul:
            for (const auto& k : e->kids)
                work.push_back(k);
            break;
        case NodeKind::Pow:
            powers[e->kids[0]] += e->value;
            break;
        case NodeKind::Add: {
            // Keep sum factors content-free: q3*(-t - 1) -> -q3*(t + 1).
            Rational c = sum_content(e);
            if (c != 1) {
                coeff *= c;
                powers[scale_sum(e, Rational(1) / c)] += 1;
            } else {
                powers[e] += 1;
            }
            break;
        }
        default:
            powers[e] += 1;
            break;
        }
    }
    std::vector<Expr> factors;
    for (const auto& [base, ex] : powers) {
        if (ex == 0)
            continue;
        Expr p = pow_impl(base, ex);
        if (p->kind == NodeKind::Num) {
            coeff *= p->value;
        } else if (p->kind == NodeKind::Mul) {
            for (const auto& k : p->kids) {
                if (k->kind == NodeKind::Num)
                    coeff *= k->value;
                else
                    factors.push_back(k);
            }
        } else {
            factors.push_back(p);
        }
    }
    if (coeff == 0)
        return zero();
    std::sort(factors.begin(), factors.end(),
              [](const Expr& x, const Expr& y) { return compare(x, y) < 0; });
    if (factors.empty())
        return num(coeff);
    if (factors.size() == 1) {
        if (coeff == 1)
            return factors[0];
        // Distribute a bare constant over a sum: -(q2 - q1) -> q1 - q2.
        if (factors[0]->kind == NodeKind::Add)
            return scale_sum(factors[0], coeff);
    }
    std::vector<Expr> out;
    out.reserve(factors.size() + 1);
    if (coeff != 1)
        out.push_back(num(coeff));
    for (auto& f : factors)
        out.push_back(std::move(f));
    if (out.size() == 1)
        return out[0];
    return make_node(NodeKind::Mul, FunTag::Ln, Rational(0), nullptr, std::move(out));
}

inline Expr pow_impl(const Expr& base, const Rational& e)
{
    if (e == 0)
        return one();
    if (e == 1)
        return base;
    switch (base->kind) {
    case NodeKind::Num: {
        const Rational& q = base->value;
        if (q == 0) {
            if (e > 0)
                return zero();
            throw Error("zero raised to a negative power");
        }
        if (q == 1)
            return one();
        if (is_integer(e))
            return num(rational_pow(q, numerator(e)));
        // Split q^e = q^floor(e) * q^f with 0 < f < 1, and extract the
        // fractional part exactly when q > 0 has a perfect root.
        BigInt n = rational_floor(e);
        Rational f = e - Rational(n);
        if (q < 0)
            return make_node(NodeKind::Pow, FunTag::Ln, e, nullptr, {base});
        unsigned d = denominator(f).convert_to<unsigned>();
        BigInt a = numerator(f);
        if (auto root = exact_nth_root(q, d)) {
            Rational whole = rational_pow(q, n) * rational_pow(*root, a);
            return num(whole);
        }
        Expr frac = make_node(NodeKind::Pow, FunTag::Ln, f, nullptr, {base});
        if (n == 0)
            return frac;
        return mul_impl({num(rational_pow(q, n)), frac});
    }
    case NodeKind::Pow:
        if (is_integer(e))
            return pow_impl(base->kids[0], base->value * e);
        break;
    case NodeKind::Mul:
        if (is_integer(e)) {
            std::vector<Expr> ks;
            ks.reserve(base->kids.size());
            for (const auto& k : base->kids)
                ks.push_back(pow_impl(k, e));
            return mul_impl(std::move(ks));
        }
        break;
    case NodeKind::Add: {
        // Pull the rational content (signed for integer exponents) out of the
        // sum, so (-t - 1)^-1 and (t + 1)^-1 share a representation.
        Rational c = sum_content(base);
        if (!is_integer(e) && c < 0)
            c = -c;
        if (c != 1) {
            Expr u = scale_sum(base, Rational(1) / c);
            return mul_impl({pow_impl(num(c), e), pow_impl(u, e)});
        }
        break;
    }
    default:
        break;
    }
    return make_node(NodeKind::Pow, FunTag::Ln, e, nullptr, {base});
}

// Leading rational coefficient and the remaining core of a term.
inline std::pair<Rational, Expr> term_split(const Expr& e)
{
    if (e->kind == NodeKind::Num)
        return {e->value, one()};
    if (e->kind == NodeKind::Mul && e->kids[0]->kind == NodeKind::Num) {
        const Rational& c = e->kids[0]->value;
        if (e->kids.size() == 2)
            return {c, e->kids[1]};
        std::vector<Expr> rest(e->kids.begin() + 1, e->kids.end());
        return {c, make_node(NodeKind::Mul, FunTag::Ln, Rational(0), nullptr,
                             std::move(rest))};
    }
    return {Rational(1), e};
}

inline Expr add_impl(std::vector<Expr> kids)
{
    Rational cst(0);
    std::map<Expr, Rational, ExprLess> terms;
    std::vector<Expr> work(std::move(kids));
    while (!work.empty()) {
        Expr e = std::move(work.back());
        work.pop_back();
        if (e->kind == NodeKind::Num) {
            cst += e->value;
        } else if (e->kind == NodeKind::Add) {
            for (const auto& k : e->kids)
                work.push_back(k);
        } else {
            auto [c, core] = term_split(e);
            terms[core] += c;
        }
    }
    std::vector<Expr> out;
    if (cst != 0)
        out.push_back(num(cst));
    for (const auto& [core, c] : terms) {
        if (c == 0)
            continue;
        if (c == 1)
            out.push_back(core);
        else
            out.push_back(mul_impl({num(c), core}));
    }
    if (out.empty())
        return zero();
    if (out.size() == 1)
        return out[0];
    return make_node(NodeKind::Add, FunTag::Ln, Rational(0), nullptr, std::move(out));
}

inline bool negative_leading(const Expr& e)
{
    if (e->kind == NodeKind::Num)
        return e->value < 0;
    if (e->kind == NodeKind::Mul && e->kids[0]->kind == NodeKind::Num)
        return e->kids[0]->value < 0;
    return false;
}

inline Expr fn_impl(FunTag tag, const Expr& arg)
{
    switch (tag) {
    case FunTag::Ln:
        if (is_one_num(arg))
            return zero();
        if (arg->kind == NodeKind::Fun && arg->tag == FunTag::Exp)
            return arg->kids[0];
        break;
    case FunTag::Exp:
        if (is_zero_num(arg))
            return one();
        if (arg->kind == NodeKind::Fun && arg->tag == FunTag::Ln)
            return arg->kids[0];
        break;
    case FunTag::Sin:
        if (is_zero_num(arg))
            return zero();
        if (negative_leading(arg))
            return mul_impl({num(-1L), fn_impl(FunTag::Sin, mul_impl({num(-1L), arg}))});
        break;
    case FunTag::Cos:
        if (is_zero_num(arg))
            return one();
        if (negative_leading(arg))
            return fn_impl(FunTag::Cos, mul_impl({num(-1L), arg}));
        break;
    }
    return make_node(NodeKind::Fun, tag, Rational(0), nullptr, {arg});
}

} // namespace detail

inline Expr add(std::vector<Expr> kids) { return detail::add_impl(std::move(kids)); }
inline Expr add(const Expr& a, const Expr& b) { return detail::add_impl({a, b}); }
inline Expr mul(std::vector<Expr> kids) { return detail::mul_impl(std::move(kids)); }
inline Expr mul(const Expr& a, const Expr& b) { return detail::mul_impl({a, b}); }
inline Expr pow(const Expr& base, Rational e) { return detail::pow_impl(base, e); }
inline Expr pow(const Expr& base, long e) { return detail::pow_impl(base, Rational(e)); }
inline Expr fn(FunTag tag, const Expr& arg) { return detail::fn_impl(tag, arg); }

inline Expr neg(const Expr& e) { return mul(num(-1L), e); }
inline Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }
inline Expr div(const Expr& a, const Expr& b) { return mul(a, pow(b, -1L)); }
inline Expr sqrt_of(const Expr& e) { return pow(e, Rational(1, 2)); }
inline Expr ln(const Expr& e) { return fn(FunTag::Ln, e); }
inline Expr exp_of(const Expr& e) { return fn(FunTag::Exp, e); }
inline Expr sin_of(const Expr& e) { return fn(FunTag::Sin, e); }
inline Expr cos_of(const Expr& e) { return fn(FunTag::Cos, e); }

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }
inline Expr operator*(const Rational& c, const Expr& e) { return mul(num(c), e); }
inline Expr operator*(long c, const Expr& e) { return mul(num(c), e); }

// ---------------------------------------------------------------------------
// Queries.

inline void collect_symbols(const Expr& e, std::set<const Symbol*>& out)
{
    if (e->kind == NodeKind::Sym) {
        out.insert(e->sym);
        return;
    }
    for (const auto& k : e->kids)
        collect_symbols(k, out);
}

inline std::set<const Symbol*> free_symbols(const Expr& e)
{
    std::set<const Symbol*> s;
    collect_symbols(e, s);
    return s;
}

inline bool depends_on(const Expr& e, const Symbol* s)
{
    if (e->kind == NodeKind::Sym)
        return e->sym == s;
    for (const auto& k : e->kids)
        if (depends_on(k, s))
            return true;
    return false;
}

inline bool depends_on_kind(const Expr& e, SymbolKind kind)
{
    if (e->kind == NodeKind::Sym)
        return e->sym->kind == kind;
    for (const auto& k : e->kids)
        if (depends_on_kind(k, kind))
            return true;
    return false;
}

inline std::size_t node_count(const Expr& e)
{
    std::size_t n = 1;
    for (const auto& k : e->kids)
        n += node_count(k);
    return n;
}

// ---------------------------------------------------------------------------
// Rewriting.

using SubstMap = std::map<const Symbol*, Expr>;

inline Expr substitute(const Expr& e, const SubstMap& m)
{
    switch (e->kind) {
    case NodeKind::Num:
        return e;
    case NodeKind::Sym: {
        auto it = m.find(e->sym);
        return it == m.end() ? e : it->second;
    }
    case NodeKind::Pow:
        return pow(substitute(e->kids[0], m), e->value);
    case NodeKind::Fun:
        return fn(e->tag, substitute(e->kids[0], m));
    case NodeKind::Mul:
    case NodeKind::Add: {
        std::vector<Expr> ks;
        ks.reserve(e->kids.size());
        for (const auto& k : e->kids)
            ks.push_back(substitute(k, m));
        return e->kind == NodeKind::Mul ? mul(std::move(ks)) : add(std::move(ks));
    }
    }
    return e;
}

// Rebuilds an expression through the canonical constructors.  Trees produced
// by this library are already normal, so this is the identity on them; it is
// exposed as the normalization entry point and is idempotent by construction.
inline Expr normalize(const Expr& e)
{
    static const SubstMap empty;
    return substitute(e, empty);
}

namespace detail {

constexpr std::size_t kExpandTermLimit = 50000;

inline Expr expand_node(const Expr& e, bool& blown);

inline Expr expand_product(const std::vector<Expr>& factors, bool& blown)
{
    // Distribute sums over the product; each entry of `acc` is one term's
    // factor list.
    std::vector<std::vector<Expr>> acc(1);
    for (const auto& f : factors) {
        if (f->kind == NodeKind::Add) {
            if (acc.size() * f->kids.size() > kExpandTermLimit) {
                blown = true;
                return mul(factors);
            }
            std::vector<std::vector<Expr>> next;
            next.reserve(acc.size() * f->kids.size());
            for (const auto& base : acc)
                for (const auto& term : f->kids) {
                    next.push_back(base);
                    next.back().push_back(term);
                }
            acc = std::move(next);
        } else {
            for (auto& lst : acc)
                lst.push_back(f);
        }
    }
    std::vector<Expr> terms;
    terms.reserve(acc.size());
    for (auto& lst : acc)
        terms.push_back(mul(std::move(lst)));
    return add(std::move(terms));
}

inline Expr expand_node(const Expr& e, bool& blown)
{
    switch (e->kind) {
    case NodeKind::Num:
    case NodeKind::Sym:
        return e;
    case NodeKind::Fun:
        return fn(e->tag, expand_node(e->kids[0], blown));
    case NodeKind::Pow: {
        Expr base = expand_node(e->kids[0], blown);
        const Rational& ex = e->value;
        if (base->kind == NodeKind::Add && is_integer(ex) && ex > 1 && ex <= 16) {
            // Repeated distribution; mul() on equal sums would fold straight
            // back into this power, so expand_product is used directly.
            long n = numerator(ex).convert_to<long>();
            Expr acc = base;
            for (long i = 1; i < n && !blown; ++i)
                acc = expand_product({acc, base}, blown);
            return blown ? pow(base, ex) : acc;
        }
        return pow(base, ex);
    }
    case NodeKind::Mul: {
        bool has_sum = false;
        for (const auto& k : e->kids)
            has_sum = has_sum || k->kind == NodeKind::Add;
        if (has_sum) {
            // Distribute before recursing into the factors: cancellation
            // between a sum's factored terms and sibling powers happens in
            // mul() and would be destroyed by expanding the terms first.
            Expr d = expand_product(e->kids, blown);
            if (blown)
                return e;
            return expand_node(d, blown);
        }
        std::vector<Expr> ks;
        ks.reserve(e->kids.size());
        for (const auto& k : e->kids) {
            ks.push_back(expand_node(k, blown));
            has_sum = has_sum || ks.back()->kind == NodeKind::Add;
        }
        if (!has_sum)
            return mul(std::move(ks));
        return expand_product(ks, blown);
    }
    case NodeKind::Add: {
        std::vector<Expr> ks;
        ks.reserve(e->kids.size());
        for (const auto& k : e->kids)
            ks.push_back(expand_node(k, blown));
        return add(std::move(ks));
    }
    }
    return e;
}

} // namespace detail

// Distributes products over sums and expands small integer powers of sums.
// Used by the zero test; oversized expansions fall back to the input.
inline Expr expand(const Expr& e)
{
    bool blown = false;
    Expr r = detail::expand_node(e, blown);
    return blown ? e : r;
}

// Expansion exposes cancellations between distributed products, but can also
// bloat a compact factored form; keep whichever representation is smaller.
inline Expr simplified(const Expr& e)
{
    Expr x = expand(e);
    return node_count(x) <= node_count(e) ? x : e;
}

// ---------------------------------------------------------------------------
// Printing.  Output is valid input for the parser and uses the minimal
// parenthesization the grammar requires.

namespace detail {

enum class PrintLevel { Sum = 0, Prefix = 1, Product = 2, Power = 3, Atom = 4 };

struct Printed {
    std::string s;
    PrintLevel level;
};

inline Printed render(const Expr& e);

inline std::string render_top(const Expr& e) { return render(e).s; }

inline bool is_nonneg_int_num(const Expr& e)
{
    return e->kind == NodeKind::Num && is_integer(e->value) && e->value >= 0;
}

inline std::string pow_base_str(const Expr& base)
{
    if (base->kind == NodeKind::Sym || base->kind == NodeKind::Fun ||
        is_nonneg_int_num(base))
        return render(base).s;
    return "(" + render_top(base) + ")";
}

inline std::string exponent_str(const Rational& e)
{
    if (is_integer(e)) {
        std::ostringstream os;
        os << numerator(e);
        return os.str();
    }
    return "(" + rational_str(e) + ")";
}

// base^|e| as a single factor (exponent already made positive by the caller).
inline Printed factor_str(const Expr& base, const Rational& e)
{
    if (e == 1) {
        Printed p = render(base);
        if (p.level < PrintLevel::Product)
            return {"(" + p.s + ")", PrintLevel::Atom};
        return p;
    }
    if (e == Rational(1, 2))
        return {"sqrt(" + render_top(base) + ")", PrintLevel::Atom};
    return {pow_base_str(base) + "^" + exponent_str(e), PrintLevel::Power};
}

struct ProductParts {
    bool negative = false;
    std::vector<Printed> nums, dens;
};

inline ProductParts product_parts(const Expr& e)
{
    ProductParts parts;
    Rational coeff(1);
    std::vector<Expr> factors;
    if (e->kind == NodeKind::Mul) {
        for (const auto& k : e->kids) {
            if (k->kind == NodeKind::Num)
                coeff *= k->value;
            else
                factors.push_back(k);
        }
    } else if (e->kind == NodeKind::Num) {
        coeff = e->value;
    } else {
        factors.push_back(e);
    }
    if (coeff < 0) {
        parts.negative = true;
        coeff = -coeff;
    }
    for (const auto& f : factors) {
        auto [base, ex] = pow_view(f);
        if (ex < 0)
            parts.dens.push_back(factor_str(*base, -ex));
        else
            parts.nums.push_back(factor_str(*base, ex));
    }
    BigInt p = numerator(coeff), q = denominator(coeff);
    if (p != 1 || parts.nums.empty()) {
        std::ostringstream os;
        os << p;
        parts.nums.insert(parts.nums.begin(), {os.str(), PrintLevel::Atom});
    }
    if (q != 1) {
        std::ostringstream os;
        os << q;
        parts.dens.insert(parts.dens.begin(), {os.str(), PrintLevel::Atom});
    }
    return parts;
}

inline Printed render_product(const Expr& e)
{
    ProductParts parts = product_parts(e);
    std::string numer;
    for (std::size_t i = 0; i < parts.nums.size(); ++i) {
        if (i)
            numer += "*";
        numer += parts.nums[i].s;
    }
    std::string s;
    PrintLevel level;
    if (parts.dens.empty()) {
        s = numer;
        level = parts.nums.size() > 1 ? PrintLevel::Product : parts.nums[0].level;
    } else {
        std::string denom;
        for (std::size_t i = 0; i < parts.dens.size(); ++i) {
            if (i)
                denom += "*";
            denom += parts.dens[i].s;
        }
        if (parts.dens.size() > 1 || parts.dens[0].level < PrintLevel::Power)
            denom = "(" + denom + ")";
        s = numer + "/" + denom;
        level = PrintLevel::Product;
    }
    if (parts.negative) {
        s = "-" + s;
        level = PrintLevel::Prefix;
    }
    return {s, level};
}

inline Printed render(const Expr& e)
{
    switch (e->kind) {
    case NodeKind::Num: {
        const Rational& v = e->value;
        if (is_integer(v)) {
            std::ostringstream os;
            os << numerator(v);
            return {os.str(), v < 0 ? PrintLevel::Prefix : PrintLevel::Atom};
        }
        return render_product(e);
    }
    case NodeKind::Sym:
        return {e->sym->name, PrintLevel::Atom};
    case NodeKind::Fun:
        return {std::string(fun_name(e->tag)) + "(" + render_top(e->kids[0]) + ")",
                PrintLevel::Atom};
    case NodeKind::Pow:
    case NodeKind::Mul:
        return render_product(e);
    case NodeKind::Add: {
        // Terms in structural order, but the rational constant (stored
        // first) reads better last: "b/x - 1" rather than "-1 + b/x".
        std::vector<Expr> order;
        order.reserve(e->kids.size());
        Expr constant;
        for (const auto& k : e->kids) {
            if (k->kind == NodeKind::Num)
                constant = k;
            else
                order.push_back(k);
        }
        if (constant)
            order.push_back(constant);
        std::string s;
        bool first = true;
        for (const auto& term : order) {
            Printed p = render(term);
            bool negative = !p.s.empty() && p.s[0] == '-';
            std::string body = negative ? p.s.substr(1) : p.s;
            if (first) {
                s = negative ? "-" + body : body;
                first = false;
            } else {
                s += negative ? " - " : " + ";
                s += body;
            }
        }
        return {s, PrintLevel::Sum};
    }
    }
    return {"?", PrintLevel::Atom};
}

} // namespace detail

inline std::string to_string(const Expr& e) { return detail::render(e).s; }

inline std::vector<std::string> to_strings(const std::vector<Expr>& es)
{
    std::vector<std::string> out;
    out.reserve(es.size());
    for (const auto& e : es)
        out.push_back(to_string(e));
    return out;
}

} // namespace avlag
