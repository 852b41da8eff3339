#include "catch2/catch_amalgamated.hpp"
#include "helpers.hpp"

#include <random>

using namespace avlag;
using avlag::testing::Example;
using avlag::testing::equivalent;
using avlag::testing::make_ctx;
using avlag::testing::proportional;

namespace {

struct Analyzed {
    Example ex;
    StructureData S;
    HolonomicSector H;
    Classification C;
};

Analyzed analyze(Example ex, ProbeContext& ctx)
{
    Analyzed a{std::move(ex), {}, {}, {}};
    a.S = structure_matrices(a.ex.lag);
    a.H = holonomic_sector(a.S, ctx);
    a.C = classify(a.S, a.H, *a.ex.table, ctx);
    return a;
}

std::vector<Expr> parse_all(const Example& ex, const std::vector<std::string>& ss)
{
    std::vector<Expr> out;
    out.reserve(ss.size());
    for (const auto& s : ss)
        out.push_back(ex.parse(s));
    return out;
}

} // namespace

TEST_CASE("classification of the worked examples", "[analysis][classify]")
{
    auto ctx = make_ctx();
    CHECK(analyze(avlag::testing::lotka_volterra(), ctx).C.tag == ClassTag::TypeI);
    CHECK(analyze(avlag::testing::linear_type_i(), ctx).C.tag == ClassTag::TypeI);
    CHECK(analyze(avlag::testing::type_ii1(), ctx).C.tag == ClassTag::TypeII1);
    CHECK(analyze(avlag::testing::type_ii2(), ctx).C.tag == ClassTag::TypeII2);
    CHECK(analyze(avlag::testing::type_ii2_time(), ctx).C.tag == ClassTag::TypeII2);
    CHECK(analyze(avlag::testing::type_ii3(), ctx).C.tag == ClassTag::TypeII3);
    CHECK(analyze(avlag::testing::harmonic(), ctx).C.tag == ClassTag::TypeI);
}

TEST_CASE("holonomic sector of the degenerate examples", "[analysis][kernel]")
{
    auto ctx = make_ctx();

    auto a3 = analyze(avlag::testing::type_ii1(), ctx);
    REQUIRE(a3.H.kernel.size() == 2);
    auto distinct = distinct_holonomic(a3.H);
    REQUIRE(distinct.size() == 1);
    CHECK(equivalent(distinct[0], a3.ex.parse("q2"), ctx));

    auto a4 = analyze(avlag::testing::type_ii2(), ctx);
    REQUIRE(a4.H.kernel.size() == 1);
    CHECK(proportional(a4.H.kernel[0], parse_all(a4.ex, {"1", "1", "1"}), ctx));
    CHECK(equivalent(a4.H.constraints[0], a4.ex.parse("q1 - q2"), ctx));
    CHECK_FALSE(a4.H.identically_zero[0]);
}

TEST_CASE("type II.1 witness and gauge data", "[analysis][gauge]")
{
    auto ctx = make_ctx();
    auto a = analyze(avlag::testing::type_ii1(), ctx);
    REQUIRE(a.C.tag == ClassTag::TypeII1);
    CHECK(a.C.both_witnesses); // this example also carries a II.2 witness

    // Z spans the stacked kernel ray (2, 0, 1, 1).
    CHECK(proportional(a.C.Z, parse_all(a.ex, {"2", "0", "1", "1"}), ctx));
    // Z lies in the right kernel of A^T stacked with omega.
    for (int k = 0; k < a.S.A.cols; ++k) {
        std::vector<Expr> terms;
        for (int j = 0; j < a.S.A.rows; ++j)
            terms.push_back(mul(a.S.A.at(j, k), a.C.Z[static_cast<std::size_t>(j)]));
        CHECK(is_zero(add(std::move(terms)), ctx).zero());
    }
    CHECK(is_zero(dot(a.S.omega, a.C.Z), ctx).zero());

    auto G = gauge_symmetry(a.ex.lag, a.C);
    REQUIRE(G);
    CHECK(G->R == 0);
    CHECK(equivalent(G->F0, a.ex.parse("2*q2"), ctx));
    CHECK(is_zero_num(G->F1));
    for (const auto& x1 : G->X1)
        CHECK(is_zero_num(x1));

    auto verdict = verify_gauge(a.ex.lag, *G, ctx);
    INFO(verdict.failed);
    CHECK(verdict.ok);
}

TEST_CASE("type II.2 witness and gauge data", "[analysis][gauge]")
{
    auto ctx = make_ctx();
    auto a = analyze(avlag::testing::type_ii2(), ctx);
    REQUIRE(a.C.tag == ClassTag::TypeII2);
    CHECK_FALSE(a.C.both_witnesses);
    CHECK(equivalent(canonicalize_constraint(a.C.phi_Y),
                     a.ex.parse("q1 - q2"), ctx));

    auto G = gauge_symmetry(a.ex.lag, a.C);
    REQUIRE(G);
    CHECK(G->R == 1);
    CHECK(proportional(G->X0, parse_all(a.ex, {"1", "1", "0"}), ctx));
    CHECK(proportional(G->X1, parse_all(a.ex, {"1", "1", "1"}), ctx));
    CHECK(equivalent(G->F0, a.ex.parse("q1 - q3"), ctx));
    CHECK(equivalent(G->F1, a.ex.parse("-q3"), ctx));

    auto verdict = verify_gauge(a.ex.lag, *G, ctx);
    INFO(verdict.failed);
    CHECK(verdict.ok);
}

TEST_CASE("time-dependent type II.2 witness", "[analysis][gauge]")
{
    auto ctx = make_ctx();
    auto a = analyze(avlag::testing::type_ii2_time(), ctx);
    REQUIRE(a.C.tag == ClassTag::TypeII2);

    REQUIRE(a.C.Y.size() == 3);
    CHECK(proportional(a.C.Y, parse_all(a.ex, {"0", "0", "1"}), ctx));
    // The corrected witness needs a kernel shift; the combination search
    // must land on Ybar = (-1, -1/(t+1), 0) exactly.
    REQUIRE(a.C.Ybar.size() == 3);
    CHECK(equivalent(a.C.Ybar[0], a.ex.parse("-1"), ctx));
    CHECK(equivalent(a.C.Ybar[1], a.ex.parse("-1/(t + 1)"), ctx));
    CHECK(is_zero(a.C.Ybar[2], ctx).zero());

    auto G = gauge_symmetry(a.ex.lag, a.C);
    REQUIRE(G);
    CHECK(G->R == 1);
    CHECK(equivalent(G->F0, a.ex.parse("q2 - t*q1/(t + 1)"), ctx));
    CHECK(is_zero(G->F1, ctx).zero());

    auto verdict = verify_gauge(a.ex.lag, *G, ctx);
    INFO(verdict.failed);
    CHECK(verdict.ok);
}

TEST_CASE("type II.3 has no gauge symmetry and records the obstruction",
          "[analysis][classify]")
{
    auto ctx = make_ctx();
    auto a = analyze(avlag::testing::type_ii3(), ctx);
    REQUIRE(a.C.tag == ClassTag::TypeII3);
    CHECK_FALSE(gauge_symmetry(a.ex.lag, a.C).has_value());
    REQUIRE(a.C.residual);
    CHECK_FALSE(is_zero(a.C.residual, ctx).zero());
}

TEST_CASE("perturbed gauge data fails verification", "[analysis][mutation]")
{
    auto ctx = make_ctx();

    auto a4 = analyze(avlag::testing::type_ii2(), ctx);
    auto G = gauge_symmetry(a4.ex.lag, a4.C);
    REQUIRE(G);

    SECTION("wrong Noether function")
    {
        GaugeSymmetry bad = *G;
        bad.F0 = add(bad.F0, a4.ex.parse("q1"));
        auto v = verify_gauge(a4.ex.lag, bad, ctx);
        CHECK_FALSE(v.ok);
        CHECK_FALSE(v.failed.empty());
        CHECK(v.witness);
    }

    SECTION("wrong direction field")
    {
        GaugeSymmetry bad = *G;
        bad.X0[2] = add(bad.X0[2], one());
        CHECK_FALSE(verify_gauge(a4.ex.lag, bad, ctx).ok);
    }

    SECTION("dropping the velocity part of an R = 1 symmetry")
    {
        GaugeSymmetry bad = *G;
        bad.X1.assign(bad.X1.size(), zero());
        bad.F1 = zero();
        CHECK_FALSE(verify_gauge(a4.ex.lag, bad, ctx).ok);
    }

    auto a3 = analyze(avlag::testing::type_ii1(), ctx);
    auto G3 = gauge_symmetry(a3.ex.lag, a3.C);
    REQUIRE(G3);

    SECTION("scaled F without scaled X")
    {
        GaugeSymmetry bad = *G3;
        bad.F0 = mul(num(2), bad.F0);
        CHECK_FALSE(verify_gauge(a3.ex.lag, bad, ctx).ok);
    }
}

TEST_CASE("reduced dynamics of the regular examples", "[analysis][dynamics]")
{
    auto ctx = make_ctx();

    auto a1 = analyze(avlag::testing::lotka_volterra(), ctx);
    auto D1 = reduced_dynamics(a1.ex.lag, a1.S, a1.H, a1.C, ctx);
    REQUIRE(D1.eta);
    CHECK_FALSE(D1.error);
    REQUIRE(D1.eta->drift.size() == 2);
    CHECK(equivalent(D1.eta->drift[0], a1.ex.parse("x*(a - y)"), ctx));
    CHECK(equivalent(D1.eta->drift[1], a1.ex.parse("-y*(b - x)"), ctx));
    // A . drift = omega.
    std::vector<Expr> Ad = matvec(a1.S.A, D1.eta->drift);
    for (std::size_t i = 0; i < Ad.size(); ++i)
        CHECK(equivalent(Ad[i], a1.S.omega[i], ctx));

    auto a2 = analyze(avlag::testing::linear_type_i(), ctx);
    auto D2 = reduced_dynamics(a2.ex.lag, a2.S, a2.H, a2.C, ctx);
    REQUIRE(D2.eta);
    auto want = parse_all(a2.ex, {"q3", "-q4", "q4", "-q2"});
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(equivalent(D2.eta->drift[i], want[i], ctx));
}

TEST_CASE("constrained dynamics of the singular examples",
          "[analysis][dynamics]")
{
    auto ctx = make_ctx();

    SECTION("II.1: two free functions")
    {
        auto a = analyze(avlag::testing::type_ii1(), ctx);
        auto D = reduced_dynamics(a.ex.lag, a.S, a.H, a.C, ctx);
        REQUIRE(D.sode);
        CHECK_FALSE(D.error);
        REQUIRE(D.sode->free_functions.size() == 2);
        REQUIRE(D.sode->kernel_directions.size() == 2);

        // The reduced field matches the reported one.
        auto vel = parse_all(a.ex, {"q3 - q4 + v_q3 + v_q4", "0", "v_q3", "v_q4"});
        for (std::size_t j = 0; j < vel.size(); ++j)
            CHECK(equivalent(D.sode->velocity[j], vel[j], ctx));
        std::vector<Expr> acc = {
            a.ex.parse("v_q3 - v_q4"), zero(), zero(), zero()};
        acc[0] = add({acc[0], var(D.sode->free_functions[0]),
                      var(D.sode->free_functions[1])});
        acc[2] = var(D.sode->free_functions[0]);
        acc[3] = var(D.sode->free_functions[1]);
        for (std::size_t j = 0; j < acc.size(); ++j)
            CHECK(equivalent(D.sode->acceleration[j], acc[j], ctx));

        auto v = verify_candidate_dynamics(a.ex.lag, *D.sode, ctx);
        INFO(v.what);
        CHECK(v.ok);
    }

    SECTION("II.2: one free function")
    {
        auto a = analyze(avlag::testing::type_ii2(), ctx);
        auto D = reduced_dynamics(a.ex.lag, a.S, a.H, a.C, ctx);
        REQUIRE(D.sode);
        REQUIRE(D.sode->free_functions.size() == 1);
        auto vel = parse_all(a.ex, {"q3 + v_q3", "q3 + v_q3", "v_q3"});
        for (std::size_t j = 0; j < vel.size(); ++j)
            CHECK(equivalent(D.sode->velocity[j], vel[j], ctx));
        Expr C1 = var(D.sode->free_functions[0]);
        std::vector<Expr> acc = {add(C1, a.ex.parse("v_q3")),
                                 add(C1, a.ex.parse("v_q3")), C1};
        for (std::size_t j = 0; j < acc.size(); ++j)
            CHECK(equivalent(D.sode->acceleration[j], acc[j], ctx));

        auto v = verify_candidate_dynamics(a.ex.lag, *D.sode, ctx);
        INFO(v.what);
        CHECK(v.ok);
    }

    SECTION("time-dependent II.2")
    {
        auto a = analyze(avlag::testing::type_ii2_time(), ctx);
        auto D = reduced_dynamics(a.ex.lag, a.S, a.H, a.C, ctx);
        REQUIRE(D.sode);
        REQUIRE(D.sode->free_functions.size() == 1);
        CHECK(equivalent(D.sode->velocity[0], a.ex.parse("-q3"), ctx));
        CHECK(equivalent(D.sode->velocity[1],
                         a.ex.parse("-(q2 + q3)/(t + 1)"), ctx));
        CHECK(equivalent(D.sode->acceleration[0], a.ex.parse("-v_q3"), ctx));
        // Reported form of the second slot, with velocities still reduced.
        CHECK(equivalent(
            D.sode->acceleration[1],
            a.ex.parse("2*(q2 + q3)/(t + 1)^2 - v_q3/(t + 1)"), ctx));

        auto v = verify_candidate_dynamics(a.ex.lag, *D.sode, ctx);
        INFO(v.what);
        CHECK(v.ok);
    }

    SECTION("II.3: dynamics exist but are unique")
    {
        auto a = analyze(avlag::testing::type_ii3(), ctx);
        auto D = reduced_dynamics(a.ex.lag, a.S, a.H, a.C, ctx);
        REQUIRE(D.sode);
        CHECK(D.sode->free_functions.empty());
        auto vel = parse_all(a.ex, {"q3", "q3", "0"});
        for (std::size_t j = 0; j < vel.size(); ++j)
            CHECK(equivalent(D.sode->velocity[j], vel[j], ctx));
        for (const auto& acc : D.sode->acceleration)
            CHECK(is_zero(acc, ctx).zero());

        auto v = verify_candidate_dynamics(a.ex.lag, *D.sode, ctx);
        INFO(v.what);
        CHECK(v.ok);
    }
}

TEST_CASE("perturbed dynamics fail candidate verification",
          "[analysis][mutation]")
{
    auto ctx = make_ctx();
    auto a = analyze(avlag::testing::type_ii2(), ctx);
    auto D = reduced_dynamics(a.ex.lag, a.S, a.H, a.C, ctx);
    REQUIRE(D.sode);

    SECTION("drift off the manifold")
    {
        ConstrainedSODE bad = *D.sode;
        bad.acceleration[0] = add(bad.acceleration[0], one());
        CHECK_FALSE(verify_candidate_dynamics(a.ex.lag, bad, ctx).ok);
    }

    SECTION("breaking the second-order property")
    {
        ConstrainedSODE bad = *D.sode;
        bad.velocity[0] = add(bad.velocity[0], a.ex.parse("q1"));
        CHECK_FALSE(verify_candidate_dynamics(a.ex.lag, bad, ctx).ok);
    }

    SECTION("wrong sign in one velocity slot")
    {
        ConstrainedSODE bad = *D.sode;
        bad.velocity[2] = neg(bad.velocity[2]);
        bad.velocity[0] = a.ex.parse("q3 - v_q3");
        bad.velocity[1] = a.ex.parse("q3 - v_q3");
        CHECK_FALSE(verify_candidate_dynamics(a.ex.lag, bad, ctx).ok);
    }
}

TEST_CASE("poisson structure of the regular case", "[analysis][poisson]")
{
    auto ctx = make_ctx();
    auto a = analyze(avlag::testing::lotka_volterra(), ctx);
    PoissonStructure P = poisson_structure(a.S, ctx);

    Expr x = a.ex.parse("x"), y = a.ex.parse("y");
    CHECK(equivalent(poisson_bracket(P, x, y, *a.ex.table),
                     a.ex.parse("x*y"), ctx));

    // The Hamiltonian is a first integral: {V, .} generates the drift.
    Expr H = a.ex.parse("a*ln(y) + b*ln(x) - x - y");
    CHECK(equivalent(poisson_bracket(P, x, H, *a.ex.table),
                     a.ex.parse("x*(a - y)"), ctx));
    CHECK(equivalent(poisson_bracket(P, y, H, *a.ex.table),
                     a.ex.parse("-y*(b - x)"), ctx));
    CHECK(is_zero(poisson_bracket(P, H, H, *a.ex.table), ctx).zero());

    // Singular input must refuse to build a bracket.
    auto a3 = analyze(avlag::testing::type_ii1(), ctx);
    CHECK_THROWS_AS(poisson_structure(a3.S, ctx), SingularMatrixError);
}

TEST_CASE("poisson bracket properties on random functions",
          "[analysis][poisson]")
{
    auto ctx = make_ctx();
    auto a = analyze(avlag::testing::lotka_volterra(), ctx);
    PoissonStructure P = poisson_structure(a.S, ctx);
    SymbolTable& T = *a.ex.table;

    std::mt19937_64 rng(60200);
    std::vector<const Symbol*> syms = {T.coordinate(0), T.coordinate(1)};
    for (int rep = 0; rep < 20; ++rep) {
        Expr f = avlag::testing::random_polynomial(rng, syms, 3);
        Expr g = avlag::testing::random_polynomial(rng, syms, 3);
        Expr h = avlag::testing::random_polynomial(rng, syms, 2);

        // Antisymmetry.
        CHECK(is_zero(add(poisson_bracket(P, f, g, T), poisson_bracket(P, g, f, T)),
                      ctx)
                  .zero());
        // Leibniz in the second slot.
        Expr lhs = poisson_bracket(P, f, mul(g, h), T);
        Expr rhs = add(mul(poisson_bracket(P, f, g, T), h),
                       mul(g, poisson_bracket(P, f, h, T)));
        CHECK(is_zero(sub(lhs, rhs), ctx).zero());
        // Jacobi.
        Expr jac = add({poisson_bracket(P, f, poisson_bracket(P, g, h, T), T),
                        poisson_bracket(P, g, poisson_bracket(P, h, f, T), T),
                        poisson_bracket(P, h, poisson_bracket(P, f, g, T), T)});
        CHECK(is_zero(jac, ctx).zero());
    }
}

TEST_CASE("full pipeline report flags every check", "[analysis][pipeline]")
{
    for (auto* make : {avlag::testing::type_ii1, avlag::testing::type_ii2,
                       avlag::testing::type_ii2_time, avlag::testing::type_ii3,
                       avlag::testing::lotka_volterra}) {
        auto ctx = make_ctx();
        Example ex = make();
        Problem prob;
        prob.table = std::move(ex.table);
        prob.lag = ex.lag;
        prob.name = "fixture";
        AnalysisOutcome out = run_analysis(prob, ctx);
        INFO(class_name(out.C.tag));
        CHECK(out.all_ok);
        for (const auto& c : out.checks) {
            INFO(c.name << ": " << c.detail);
            CHECK(c.ok);
        }
    }

    // Warnings carry the between-type diagnostics.
    auto ctx = make_ctx();
    Example ex3 = avlag::testing::type_ii1();
    Problem prob;
    prob.table = std::move(ex3.table);
    prob.lag = ex3.lag;
    AnalysisOutcome out = run_analysis(prob, ctx);
    bool saw_both = false;
    for (const auto& w : out.warnings)
        saw_both = saw_both || w.find("witness") != std::string::npos;
    CHECK(saw_both);

    auto ctx6 = make_ctx();
    Example ex6 = avlag::testing::type_ii3();
    Problem prob6;
    prob6.table = std::move(ex6.table);
    prob6.lag = ex6.lag;
    AnalysisOutcome out6 = run_analysis(prob6, ctx6);
    bool saw_none = false;
    for (const auto& w : out6.warnings)
        saw_none = saw_none || w.find("no gauge symmetry") != std::string::npos;
    CHECK(saw_none);
}

TEST_CASE("scaling the one-form preserves classification and drift",
          "[analysis][property]")
{
    auto ctx = make_ctx();
    for (const Rational& c : {Rational(2), Rational(-3), Rational(1, 2)}) {
        for (auto* make : {avlag::testing::lotka_volterra,
                           avlag::testing::linear_type_i,
                           avlag::testing::type_ii1, avlag::testing::type_ii2,
                           avlag::testing::type_ii2_time,
                           avlag::testing::type_ii3}) {
            Example ex = make();
            Example scaled = make();
            for (auto& mi : scaled.lag.m)
                mi = mul(num(c), mi);
            scaled.lag.V = mul(num(c), scaled.lag.V);

            auto a = analyze(std::move(ex), ctx);
            StructureData S = structure_matrices(scaled.lag);
            HolonomicSector H = holonomic_sector(S, ctx);
            Classification C = classify(S, H, *scaled.table, ctx);
            CHECK(C.tag == a.C.tag);

            if (C.tag == ClassTag::TypeI) {
                auto D0 = reduced_dynamics(a.ex.lag, a.S, a.H, a.C, ctx);
                auto D1 = reduced_dynamics(scaled.lag, S, H, C, ctx);
                REQUIRE(D0.eta);
                REQUIRE(D1.eta);
                for (std::size_t i = 0; i < D0.eta->drift.size(); ++i)
                    CHECK(equivalent(D0.eta->drift[i], D1.eta->drift[i], ctx));
            }
        }
    }
}
