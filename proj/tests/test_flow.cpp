#include "catch2/catch_amalgamated.hpp"
#include "helpers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace avlag;
using avlag::testing::make_ctx;

namespace {

EtaField drift_of(const avlag::testing::Example& ex, ProbeContext& ctx)
{
    StructureData S = structure_matrices(ex.lag);
    HolonomicSector H = holonomic_sector(S, ctx);
    Classification C = classify(S, H, *ex.table, ctx);
    REQUIRE(C.tag == ClassTag::TypeI);
    auto D = reduced_dynamics(ex.lag, S, H, C, ctx);
    REQUIRE(D.eta);
    return *D.eta;
}

} // namespace

TEST_CASE("fourth-order convergence on the harmonic oscillator",
          "[flow][integrate]")
{
    auto ctx = make_ctx();
    auto ex = avlag::testing::harmonic();
    EtaField eta = drift_of(ex, ctx);

    const double T = 1.0;
    auto endpoint_error = [&](double h) {
        IntegrateOptions opt;
        opt.t0 = 0.0;
        opt.t1 = T;
        opt.step = h;
        Trajectory tr = integrate_reduced(*ex.table, eta, {1.0, 0.0}, opt, {});
        double q = tr.q.back()[0], p = tr.q.back()[1];
        return std::hypot(q - std::cos(T), p + std::sin(T));
    };

    double e1 = endpoint_error(0.05);
    double e2 = endpoint_error(0.025);
    INFO("e(h)=" << e1 << " e(h/2)=" << e2);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("sample spacing is uniform and inclusive of both endpoints",
          "[flow][integrate]")
{
    auto ctx = make_ctx();
    auto ex = avlag::testing::harmonic();
    EtaField eta = drift_of(ex, ctx);
    IntegrateOptions opt;
    opt.t0 = 0.25;
    opt.t1 = 1.25;
    opt.step = 0.125;
    Trajectory tr = integrate_reduced(*ex.table, eta, {1.0, 0.0}, opt, {});
    REQUIRE(tr.q.size() == tr.t.size());
    REQUIRE(tr.t.size() == 9);
    for (std::size_t k = 0; k < tr.t.size(); ++k)
        CHECK(tr.t[k] == Catch::Approx(0.25 + 0.125 * static_cast<double>(k))
                             .margin(1e-14));
    CHECK(tr.step == 0.125);
    CHECK(tr.method == "rk4");
}

TEST_CASE("equilibria stay put", "[flow][integrate]")
{
    auto ctx = make_ctx();
    auto ex = avlag::testing::lotka_volterra();
    EtaField eta = drift_of(ex, ctx);
    // The interior fixed point of the predator-prey flow is (b, a).
    std::map<const Symbol*, double> params = {
        {ex.table->parameters()[0], 0.8}, // a
        {ex.table->parameters()[1], 1.7}, // b
    };
    IntegrateOptions opt;
    opt.t0 = 0.0;
    opt.t1 = 5.0;
    opt.step = 1e-2;
    Trajectory tr = integrate_reduced(*ex.table, eta, {1.7, 0.8}, opt, params);
    for (const auto& state : tr.q) {
        CHECK(std::abs(state[0] - 1.7) < 1e-12);
        CHECK(std::abs(state[1] - 0.8) < 1e-12);
    }
}

TEST_CASE("integration rejects bad setup and bad points", "[flow][integrate]")
{
    auto ctx = make_ctx();
    auto ex = avlag::testing::lotka_volterra();
    EtaField eta = drift_of(ex, ctx);
    std::map<const Symbol*, double> params = {
        {ex.table->parameters()[0], 1.0},
        {ex.table->parameters()[1], 1.0},
    };
    IntegrateOptions opt;

    CHECK_THROWS_AS(integrate_reduced(*ex.table, eta, {1.0}, opt, params),
                    InputError);
    opt.step = -1.0;
    CHECK_THROWS_AS(integrate_reduced(*ex.table, eta, {1.0, 1.5}, opt, params),
                    InputError);
    opt.step = 1e-2;
    opt.t1 = -1.0;
    CHECK_THROWS_AS(integrate_reduced(*ex.table, eta, {1.0, 1.5}, opt, params),
                    InputError);

    // Missing parameter binding.
    opt.t1 = 1.0;
    CHECK_THROWS_AS(integrate_reduced(*ex.table, eta, {1.0, 1.5}, opt, {}),
                    EvalError);

    // A field that blows up in finite time must fail loudly, not emit NaNs:
    // dq/dt = q^2 from q(0) = 1 leaves the reals at t = 1.
    avlag::testing::Example bl;
    bl.table = std::make_unique<SymbolTable>();
    bl.table->add_coordinate("q");
    bl.table->add_coordinate("p");
    bl.lag = from_hamiltonian(*bl.table, bl.parse("q^2*p"), 1);
    EtaField blow = drift_of(bl, ctx);
    IntegrateOptions bop;
    bop.t1 = 2.0;
    bop.step = 1e-2;
    CHECK_THROWS_AS(integrate_reduced(*bl.table, blow, {1.0, 0.0}, bop, {}),
                    EvalError);
}

TEST_CASE("conserved quantities hold to integrator accuracy", "[flow][drift]")
{
    auto ctx = make_ctx();
    auto ex = avlag::testing::lotka_volterra();
    EtaField eta = drift_of(ex, ctx);
    std::map<const Symbol*, double> params = {
        {ex.table->parameters()[0], 1.0},
        {ex.table->parameters()[1], 1.0},
    };
    IntegrateOptions opt;
    opt.t0 = 0.0;
    opt.t1 = 10.0;
    opt.step = 1e-3;
    Trajectory tr = integrate_reduced(*ex.table, eta, {1.5, 0.7}, opt, params);

    std::vector<Observable> obs = {{"H", ex.parse("a*ln(y) + b*ln(x) - x - y")},
                                   {"x", ex.parse("x")}};
    StructureData S = structure_matrices(ex.lag);
    std::vector<Expr> primary = primary_constraints(S, *ex.table);
    DriftReport rep = drift_report(*ex.table, tr, obs, primary, params);

    REQUIRE(rep.names.size() == 2);
    CHECK(rep.names[0] == "H");
    CHECK(rep.max_drift[0] < 1e-8);  // first integral
    CHECK(rep.max_drift[1] > 1e-3);  // x itself genuinely moves
    CHECK(rep.initial[0] == Catch::Approx(std::log(0.7) + std::log(1.5) - 2.2));

    // Primary-constraint residuals, evaluated with central differences,
    // vanish to the differencing accuracy.
    REQUIRE(rep.residual_names.size() == 2);
    CHECK(rep.residual_names[0] == "Phi_1");
    for (double r : rep.max_residual)
        CHECK(r < 1e-4);
}

TEST_CASE("csv output round-trips the samples", "[flow][csv]")
{
    auto ctx = make_ctx();
    auto ex = avlag::testing::harmonic();
    EtaField eta = drift_of(ex, ctx);
    IntegrateOptions opt;
    opt.t0 = 0.0;
    opt.t1 = 0.5;
    opt.step = 0.1;
    Trajectory tr = integrate_reduced(*ex.table, eta, {1.0, 0.0}, opt, {});

    std::string path = "csv_roundtrip_test.csv";
    write_csv(path, *ex.table, tr);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,q,p");
    std::size_t rows = 0;
    std::string line;
    double last_q = 0.0;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        double t, q, p;
        REQUIRE((is >> t >> q >> p));
        if (rows + 1 == tr.t.size())
            last_q = q;
        ++rows;
    }
    CHECK(rows == tr.t.size());
    CHECK(last_q == Catch::Approx(tr.q.back()[0]).epsilon(1e-15));
    std::remove(path.c_str());
}
