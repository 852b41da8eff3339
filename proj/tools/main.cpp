// avlag: constraint analysis and reduced dynamics for Lagrangians that are
// affine in the velocities.
//
//   avlag analyze <problem.json> [--report PATH] [--seed N]
//                 [--probe-points K] [--tol EPS]
//   avlag integrate <problem.json> --initial "x=1,y=1,a=2,b=1"
//                 [--t0 T] [--t1 T] [--step H] [--observe [NAME=]EXPR]...
//                 [--csv PATH] [--seed N] [--probe-points K] [--tol EPS]
//
// Exit codes: 0 success; 2 input error; 3 internal verification failure;
// 4 dynamics underdetermined (not Type I); 5 numeric failure.

#include "avlag/avlag.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

struct CommonFlags {
    std::string file;
    std::uint64_t seed = 0;
    int probe_points = 16;
    double tol = 1e-9;
};

avlag::ProbeContext make_context(const CommonFlags& f)
{
    avlag::ProbeContext ctx;
    ctx.cfg.seed = f.seed;
    ctx.cfg.points = f.probe_points;
    ctx.cfg.tol = f.tol;
    return ctx;
}

int cmd_analyze(const CommonFlags& flags, const std::string& report_path)
{
    avlag::Problem P = avlag::load_problem(flags.file);
    avlag::ProbeContext ctx = make_context(flags);
    avlag::AnalysisOutcome O = avlag::run_analysis(P, ctx);
    avlag::Json report = avlag::build_report(P, O, ctx);
    std::string text = report.dump(2);
    text += "\n";
    if (report_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(report_path);
        if (!out)
            throw avlag::InputError("cannot open report file: " + report_path);
        out << text;
    }
    if (!O.all_ok) {
        std::cerr << "verification failed:";
        for (const auto& c : O.checks)
            if (!c.ok)
                std::cerr << " " << c.name;
        std::cerr << "\n";
        return 3;
    }
    return 0;
}

// "x=1,y=0.5" -> name/value pairs.
std::map<std::string, double> parse_assignments(const std::string& text)
{
    std::map<std::string, double> out;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t comma = text.find(',', i);
        if (comma == std::string::npos)
            comma = text.size();
        std::string item = text.substr(i, comma - i);
        std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw avlag::InputError("expected name=value in --initial, got: " +
                                    item);
        std::string name = item.substr(0, eq);
        while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front())))
            name.erase(name.begin());
        while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back())))
            name.pop_back();
        try {
            out[name] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw avlag::InputError("invalid numeric value in --initial: " + item);
        }
        i = comma + 1;
    }
    return out;
}

int cmd_integrate(const CommonFlags& flags, const std::string& initial,
                  const avlag::IntegrateOptions& opt,
                  const std::vector<std::string>& observe_args,
                  const std::string& csv_path)
{
    avlag::Problem P = avlag::load_problem(flags.file);
    avlag::SymbolTable& T = *P.table;
    avlag::ProbeContext ctx = make_context(flags);
    avlag::AnalysisOutcome O = avlag::run_analysis(P, ctx);
    if (O.C.tag != avlag::ClassTag::TypeI) {
        std::cerr << "dynamics underdetermined (" << avlag::class_name(O.C.tag)
                  << ")\n";
        return 4;
    }
    if (!O.D.eta)
        throw avlag::VerificationError("Type I problem without a drift field");

    std::map<std::string, double> given = parse_assignments(initial);
    std::vector<double> q0(static_cast<std::size_t>(T.dimension()), 0.0);
    std::map<const avlag::Symbol*, double> params;
    for (int j = 0; j < T.dimension(); ++j) {
        auto it = given.find(T.coordinate(j)->name);
        if (it == given.end())
            throw avlag::InputError("missing initial value for coordinate " +
                                    T.coordinate(j)->name);
        q0[static_cast<std::size_t>(j)] = it->second;
        given.erase(it);
    }
    for (const avlag::Symbol* p : T.parameters()) {
        auto it = given.find(p->name);
        if (it == given.end())
            throw avlag::InputError("missing value for parameter " + p->name);
        params[p] = it->second;
        given.erase(it);
    }
    if (!given.empty())
        throw avlag::InputError("unknown name in --initial: " +
                                given.begin()->first);

    std::vector<avlag::Observable> obs;
    for (std::size_t k = 0; k < observe_args.size(); ++k) {
        const std::string& a = observe_args[k];
        std::string name, exprtext = a;
        std::size_t eq = a.find('=');
        if (eq != std::string::npos) {
            std::string head = a.substr(0, eq);
            bool ident = !head.empty();
            for (char c : head)
                ident = ident && (std::isalnum(static_cast<unsigned char>(c)) ||
                                  c == '_');
            if (ident) {
                name = head;
                exprtext = a.substr(eq + 1);
            }
        }
        if (name.empty())
            name = exprtext;
        avlag::Expr e = avlag::parse_expression(exprtext, T);
        if (avlag::depends_on_kind(e, avlag::SymbolKind::Velocity) ||
            avlag::depends_on_kind(e, avlag::SymbolKind::Acceleration))
            throw avlag::InputError(
                "observables may depend only on time, coordinates, parameters: " +
                exprtext);
        obs.push_back({name, e});
    }

    try {
        avlag::Trajectory tr =
            avlag::integrate_reduced(T, *O.D.eta, q0, opt, params);
        avlag::DriftReport rep = avlag::drift_report(
            T, tr, obs, avlag::primary_constraints(O.S, T), params);
        if (!csv_path.empty())
            avlag::write_csv(csv_path, T, tr);
        char buf[32];
        std::printf("samples: %zu\n", tr.t.size());
        for (std::size_t k = 0; k < rep.names.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", rep.max_drift[k]);
            std::printf("%s: %s\n", rep.names[k].c_str(), buf);
        }
        for (std::size_t k = 0; k < rep.residual_names.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", rep.max_residual[k]);
            std::printf("%s: %s\n", rep.residual_names[k].c_str(), buf);
        }
        return 0;
    } catch (const avlag::EvalError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 5;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"constraint analysis for velocity-affine Lagrangians", "avlag"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string report_path;
    std::string initial;
    avlag::IntegrateOptions opt;
    std::vector<std::string> observe_args;
    std::string csv_path;

    auto add_common = [&](CLI::App* c) {
        c->add_option("file", flags.file, "problem file (JSON)")->required();
        c->add_option("--seed", flags.seed, "probe seed (default 0)");
        c->add_option("--probe-points", flags.probe_points,
                      "numeric probe points (default 16)");
        c->add_option("--tol", flags.tol, "probe tolerance (default 1e-9)");
    };

    CLI::App* an = app.add_subcommand("analyze", "classify and reduce a problem");
    add_common(an);
    an->add_option("--report", report_path, "write the JSON report here");

    CLI::App* in = app.add_subcommand("integrate", "integrate the reduced flow");
    add_common(in);
    in->add_option("--initial", initial, "comma-separated name=value pairs")
        ->required();
    in->add_option("--t0", opt.t0, "start time (default 0)");
    in->add_option("--t1", opt.t1, "end time (default 1)");
    in->add_option("--step", opt.step, "step size (default 1e-3)");
    in->add_option("--observe", observe_args,
                   "observable [NAME=]EXPR (repeatable)");
    in->add_option("--csv", csv_path, "write the trajectory CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (an->parsed())
            return cmd_analyze(flags, report_path);
        return cmd_integrate(flags, initial, opt, observe_args, csv_path);
    } catch (const avlag::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const avlag::Error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
