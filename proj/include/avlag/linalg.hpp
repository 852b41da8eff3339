#pragma once

#include "avlag/canonical.hpp"
#include "avlag/numeric.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <set>
#include <sstream>
#include <vector>

namespace avlag {

struct SymMatrix {
    int rows = 0, cols = 0;
    std::vector<Expr> a;

    SymMatrix() = default;
    SymMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, zero()) {}

    Expr& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const Expr& at(int i, int j) const
    {
        return a[static_cast<std::size_t>(i) * cols + j];
    }

    static SymMatrix identity(int n)
    {
        SymMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            m.at(i, i) = one();
        return m;
    }

    SymMatrix transposed() const
    {
        SymMatrix m(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m.at(j, i) = at(i, j);
        return m;
    }

    void swap_rows(int i, int j)
    {
        if (i == j)
            return;
        for (int c = 0; c < cols; ++c)
            std::swap(at(i, c), at(j, c));
    }
};

inline std::vector<Expr> matvec(const SymMatrix& M, const std::vector<Expr>& x)
{
    std::vector<Expr> y(M.rows, zero());
    for (int i = 0; i < M.rows; ++i) {
        std::vector<Expr> terms;
        for (int j = 0; j < M.cols; ++j)
            terms.push_back(mul(M.at(i, j), x[j]));
        y[i] = add(std::move(terms));
    }
    return y;
}

inline Expr dot(const std::vector<Expr>& a, const std::vector<Expr>& b)
{
    std::vector<Expr> terms;
    terms.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        terms.push_back(mul(a[i], b[i]));
    return add(std::move(terms));
}

struct PivotUndecidableError : Error {
    using Error::Error;
};
struct RankMismatchError : Error {
    using Error::Error;
};
struct SingularMatrixError : Error {
    using Error::Error;
};

// Pivot-grade zero decision: a symbolic entry is accepted as nonzero (or
// rejected as zero) only if two independently seeded probe passes agree.
inline bool probed_nonzero(const Expr& e, ProbeContext& ctx)
{
    ZeroVerdict v1 = is_zero(e, ctx, 0);
    if (v1.structural())
        return false;
    ZeroVerdict v2 = is_zero(e, ctx, 1);
    if (v1.zero() != v2.zero())
        throw PivotUndecidableError("pivot decision for '" + to_string(e) +
                                    "' flips between probe seeds");
    return !v1.zero();
}

// ---------------------------------------------------------------------------
// Reduced row echelon form over the field of symbolic expressions.

struct RrefResult {
    SymMatrix R;
    std::vector<int> pivot_row_of_col; // -1 where the column is free
    std::vector<int> pivot_cols;
    int rank = 0;
};

namespace detail {

// Structurally nonzero constants are preferred as pivots; symbolic
// candidates must pass the two-seed probe.
inline int pick_pivot_row(const SymMatrix& W, int col, int from, ProbeContext& ctx)
{
    for (int i = from; i < W.rows; ++i)
        if (is_num(W.at(i, col)) && !is_zero_num(W.at(i, col)))
            return i;
    for (int i = from; i < W.rows; ++i) {
        const Expr& e = W.at(i, col);
        if (is_zero_num(e) || is_num(e))
            continue;
        if (probed_nonzero(e, ctx))
            return i;
    }
    return -1;
}

} // namespace detail

inline RrefResult rref(SymMatrix W, int primary_cols, ProbeContext& ctx)
{
    RrefResult res;
    res.pivot_row_of_col.assign(primary_cols, -1);
    int r = 0;
    for (int col = 0; col < primary_cols && r < W.rows; ++col) {
        int row = detail::pick_pivot_row(W, col, r, ctx);
        if (row < 0)
            continue;
        W.swap_rows(r, row);
        Expr p = W.at(r, col);
        for (int j = 0; j < W.cols; ++j)
            W.at(r, j) = j == col ? one() : div(W.at(r, j), p);
        for (int i = 0; i < W.rows; ++i) {
            if (i == r)
                continue;
            Expr f = W.at(i, col);
            if (is_zero_num(f))
                continue;
            for (int j = 0; j < W.cols; ++j)
                W.at(i, j) = j == col ? zero() : sub(W.at(i, j), mul(f, W.at(r, j)));
        }
        res.pivot_row_of_col[col] = r;
        res.pivot_cols.push_back(col);
        ++r;
    }
    res.rank = r;
    res.R = std::move(W);
    return res;
}

// Kernel read off an rref: one vector per free column, echelon-canonical,
// denominators cleared, leading coefficient positive.
inline std::vector<std::vector<Expr>> kernel_from_rref(const RrefResult& rr, int n)
{
    std::vector<std::vector<Expr>> out;
    for (int j = 0; j < n; ++j) {
        if (rr.pivot_row_of_col[j] >= 0)
            continue;
        std::vector<Expr> v(n, zero());
        v[j] = one();
        for (int c = 0; c < n; ++c) {
            int pr = rr.pivot_row_of_col[c];
            if (pr >= 0)
                v[c] = neg(rr.R.at(pr, j));
        }
        out.push_back(canonicalize_vector(v));
    }
    return out;
}

inline std::vector<std::vector<Expr>> null_right(const SymMatrix& B, ProbeContext& ctx)
{
    RrefResult rr = rref(B, B.cols, ctx);
    return kernel_from_rref(rr, B.cols);
}

// Basis of { Y : Mᵀ Y = 0 }.
inline std::vector<std::vector<Expr>> nullspace_basis(const SymMatrix& M,
                                                      ProbeContext& ctx)
{
    return null_right(M.transposed(), ctx);
}

struct LinearSolution {
    bool consistent = true;
    std::vector<Expr> particular;           // free components set to zero
    std::vector<std::vector<Expr>> kernel;  // canonicalized basis
    Expr residual;                          // set when inconsistent
};

inline LinearSolution solve_linear(const SymMatrix& M, const std::vector<Expr>& b,
                                   ProbeContext& ctx)
{
    if (static_cast<int>(b.size()) != M.rows)
        throw Error("solve_linear: dimension mismatch");
    SymMatrix W(M.rows, M.cols + 1);
    for (int i = 0; i < M.rows; ++i) {
        for (int j = 0; j < M.cols; ++j)
            W.at(i, j) = M.at(i, j);
        W.at(i, M.cols) = b[i];
    }
    RrefResult rr = rref(std::move(W), M.cols, ctx);
    LinearSolution sol;
    for (int i = rr.rank; i < M.rows; ++i) {
        const Expr& res = rr.R.at(i, M.cols);
        if (probed_nonzero(res, ctx)) {
            sol.consistent = false;
            sol.residual = res;
            break;
        }
    }
    if (sol.consistent) {
        sol.particular.assign(M.cols, zero());
        for (int c = 0; c < M.cols; ++c) {
            int pr = rr.pivot_row_of_col[c];
            if (pr >= 0)
                sol.particular[c] = rr.R.at(pr, M.cols);
        }
    }
    sol.kernel = kernel_from_rref(rr, M.cols);
    return sol;
}

inline SymMatrix inverse(const SymMatrix& M, ProbeContext& ctx)
{
    if (M.rows != M.cols)
        throw Error("inverse: matrix is not square");
    int n = M.rows;
    SymMatrix W(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            W.at(i, j) = M.at(i, j);
        W.at(i, n + i) = one();
    }
    RrefResult rr = rref(std::move(W), n, ctx);
    if (rr.rank < n)
        throw SingularMatrixError("matrix is singular (rank " +
                                  std::to_string(rr.rank) + " of " +
                                  std::to_string(n) + ")");
    SymMatrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            inv.at(i, j) = rr.R.at(i, n + j);
    return inv;
}

// ---------------------------------------------------------------------------
// Generic rank: fraction-free elimination, cross-checked numerically.

struct RankInfo {
    int rank = 0;
    std::vector<Expr> degeneracy_locus; // non-constant canonical pivots
};

namespace detail {

inline int numeric_rank_check(const SymMatrix& M, int symbolic_rank,
                              ProbeContext& ctx)
{
    if (M.rows == 0 || M.cols == 0) {
        if (symbolic_rank != 0)
            throw RankMismatchError("empty matrix with nonzero symbolic rank");
        return 0;
    }
    std::set<const Symbol*> syms;
    for (const auto& e : M.a)
        collect_symbols(e, syms);
    std::vector<const Symbol*> symbols(syms.begin(), syms.end());
    std::sort(symbols.begin(), symbols.end(),
              [](const Symbol* a, const Symbol* b) { return a->name < b->name; });

    std::size_t mh = 1469598103934665603ULL;
    for (const auto& e : M.a)
        mh = detail::combine(mh, e->hash);
    std::mt19937_64 rng(ctx.cfg.seed ^ mh);

    EvalPolicy probe{1e-8};
    Bindings b;
    Eigen::MatrixXd Md(M.rows, M.cols);
    int best = -1, good = 0, attempts = 0;
    const int limit = 100 * ctx.cfg.points;
    std::vector<std::pair<const Symbol*, double>> best_point;
    while (good < ctx.cfg.points && attempts < limit) {
        ++attempts;
        for (const Symbol* s : symbols)
            b.set(s, draw_symbol_value(rng, s));
        bool ok = true;
        for (int i = 0; i < M.rows && ok; ++i)
            for (int j = 0; j < M.cols && ok; ++j) {
                try {
                    Md(i, j) = eval2(M.at(i, j), b, probe).value;
                } catch (const EvalError& err) {
                    if (err.kind == EvalErrorKind::Unbound)
                        throw;
                    ok = false;
                }
            }
        if (!ok)
            continue;
        ++good;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Md);
        const auto& sv = svd.singularValues();
        double cut = sv.size() ? 1e-8 * sv(0) : 0.0;
        int nr = 0;
        for (int k = 0; k < sv.size(); ++k)
            if (sv(k) > cut && sv(k) > 0)
                ++nr;
        if (nr > best) {
            best = nr;
            best_point.clear();
            for (const Symbol* s : symbols)
                best_point.emplace_back(s, b.get(s));
        }
    }
    if (good < ctx.cfg.points)
        throw DomainExhaustedError("domain exhausted during numeric rank check");
    if (best != symbolic_rank) {
        std::ostringstream os;
        os << "symbolic rank " << symbolic_rank << " but maximal numeric rank "
           << best << " (degeneracy suspected) at point {";
        for (std::size_t k = 0; k < best_point.size(); ++k) {
            if (k)
                os << ", ";
            os << best_point[k].first->name << "=" << best_point[k].second;
        }
        os << "}";
        throw RankMismatchError(os.str());
    }
    return best;
}

} // namespace detail

inline RankInfo rank_info(const SymMatrix& M, ProbeContext& ctx)
{
    SymMatrix W = M;
    RankInfo info;
    std::set<Expr, ExprLess> seen;
    int r = 0;
    for (int col = 0; col < W.cols && r < W.rows; ++col) {
        int row = detail::pick_pivot_row(W, col, r, ctx);
        if (row < 0)
            continue;
        W.swap_rows(r, row);
        const Expr p = W.at(r, col);
        Expr cp = canonicalize_constraint(p);
        if (!is_num(cp) && seen.insert(cp).second)
            info.degeneracy_locus.push_back(cp);
        // Fraction-free update of the rows still in play.
        for (int i = r + 1; i < W.rows; ++i) {
            Expr f = W.at(i, col);
            if (is_zero_num(f))
                continue;
            for (int j = 0; j < W.cols; ++j)
                W.at(i, j) = j <= col ? (j == col ? zero() : W.at(i, j))
                                      : sub(mul(p, W.at(i, j)), mul(f, W.at(r, j)));
        }
        ++r;
    }
    info.rank = r;
    detail::numeric_rank_check(M, info.rank, ctx);
    return info;
}

inline int generic_rank(const SymMatrix& M, ProbeContext& ctx)
{
    return rank_info(M, ctx).rank;
}

} // namespace avlag
