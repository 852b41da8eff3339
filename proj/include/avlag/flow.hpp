#pragma once

#include "avlag/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace avlag {

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> q; // one state vector per sample
    double step = 0.0;
    std::string method = "rk4";
};

struct IntegrateOptions {
    double t0 = 0.0;
    double t1 = 1.0;
    double step = 1e-3;
};

namespace detail {

// Compiled right-hand side: binds (t, q) and evaluates the drift.
class DriftEvaluator {
public:
    DriftEvaluator(const SymbolTable& T, std::vector<Expr> drift)
        : table_(&T), drift_(std::move(drift))
    {
    }

    void operator()(double t, const std::vector<double>& q,
                    std::vector<double>& dq, Bindings& b) const
    {
        if (table_->has_time())
            b.set(table_->time(), t);
        for (int j = 0; j < table_->dimension(); ++j)
            b.set(table_->coordinate(j), q[static_cast<std::size_t>(j)]);
        for (std::size_t j = 0; j < drift_.size(); ++j) {
            try {
                dq[j] = eval2(drift_[j], b, policy_).value;
            } catch (const EvalError& err) {
                throw EvalError(err.kind, std::string(err.what()) +
                                              " while evaluating drift component " +
                                              to_string(drift_[j]));
            }
        }
    }

private:
    const SymbolTable* table_;
    std::vector<Expr> drift_;
    EvalPolicy policy_{1e-12};
};

} // namespace detail

// Classical fourth-order Runge-Kutta on the reduced field with uniform step;
// the sample count is floor((t1-t0)/h)+1.  Parameter values must already be
// bound in `params`.  Evaluation failures (log of a negative number, a
// vanishing denominator, non-finite state) surface as EvalError.
inline Trajectory integrate_reduced(const SymbolTable& T, const EtaField& eta,
                                    std::vector<double> q0,
                                    const IntegrateOptions& opt,
                                    const std::map<const Symbol*, double>& params)
{
    if (static_cast<int>(q0.size()) != T.dimension())
        throw InputError("initial state has wrong dimension");
    if (!(opt.step > 0.0))
        throw InputError("step size must be positive");
    if (!(opt.t1 > opt.t0))
        throw InputError("t1 must exceed t0");

    detail::DriftEvaluator f(T, eta.drift);
    Bindings b;
    for (const auto& [s, v] : params)
        b.set(s, v);

    const std::size_t n = q0.size();
    const double h = opt.step;
    const long steps = static_cast<long>(std::floor((opt.t1 - opt.t0) / h + 1e-9));

    Trajectory tr;
    tr.step = h;
    tr.t.reserve(static_cast<std::size_t>(steps) + 1);
    tr.q.reserve(static_cast<std::size_t>(steps) + 1);
    std::vector<double> q = std::move(q0);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    tr.t.push_back(opt.t0);
    tr.q.push_back(q);
    for (long s = 0; s < steps; ++s) {
        double t = opt.t0 + static_cast<double>(s) * h;
        f(t, q, k1, b);
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = q[j] + 0.5 * h * k1[j];
        f(t + 0.5 * h, tmp, k2, b);
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = q[j] + 0.5 * h * k2[j];
        f(t + 0.5 * h, tmp, k3, b);
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = q[j] + h * k3[j];
        f(t + h, tmp, k4, b);
        for (std::size_t j = 0; j < n; ++j) {
            q[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            if (!std::isfinite(q[j]))
                throw EvalError(EvalErrorKind::NonFinite,
                                "state became non-finite during integration");
        }
        tr.t.push_back(opt.t0 + static_cast<double>(s + 1) * h);
        tr.q.push_back(q);
    }
    return tr;
}

struct Observable {
    std::string name;
    Expr expr;
};

struct DriftReport {
    std::vector<std::string> names;
    std::vector<double> initial;
    std::vector<double> max_drift;          // max |f(t_k) - f(t_0)|
    std::vector<std::string> residual_names; // primary-constraint residuals
    std::vector<double> max_residual;
};

// Evaluates observables along a trajectory and reports the worst drift from
// their initial values.  The primary constraints are evaluated with the
// velocities replaced by central differences of the sampled states and their
// maxima reported alongside.
inline DriftReport drift_report(const SymbolTable& T, const Trajectory& tr,
                                const std::vector<Observable>& obs,
                                const std::vector<Expr>& primary,
                                const std::map<const Symbol*, double>& params)
{
    DriftReport rep;
    Bindings b;
    for (const auto& [s, v] : params)
        b.set(s, v);
    EvalPolicy policy{1e-12};
    auto bind_state = [&](std::size_t s) {
        if (T.has_time())
            b.set(T.time(), tr.t[s]);
        for (int j = 0; j < T.dimension(); ++j)
            b.set(T.coordinate(j), tr.q[s][static_cast<std::size_t>(j)]);
    };

    for (const auto& o : obs)
        rep.names.push_back(o.name);
    rep.initial.assign(obs.size(), 0.0);
    rep.max_drift.assign(obs.size(), 0.0);
    for (std::size_t s = 0; s < tr.t.size(); ++s) {
        bind_state(s);
        for (std::size_t k = 0; k < obs.size(); ++k) {
            double v = detail::eval2(obs[k].expr, b, policy).value;
            if (s == 0)
                rep.initial[k] = v;
            else
                rep.max_drift[k] =
                    std::max(rep.max_drift[k], std::abs(v - rep.initial[k]));
        }
    }

    for (std::size_t i = 0; i < primary.size(); ++i)
        rep.residual_names.push_back("Phi_" + std::to_string(i + 1));
    rep.max_residual.assign(primary.size(), 0.0);
    if (tr.t.size() >= 3) {
        for (std::size_t s = 1; s + 1 < tr.t.size(); ++s) {
            bind_state(s);
            double dt = tr.t[s + 1] - tr.t[s - 1];
            for (int j = 0; j < T.dimension(); ++j) {
                std::size_t ju = static_cast<std::size_t>(j);
                b.set(T.velocity(j), (tr.q[s + 1][ju] - tr.q[s - 1][ju]) / dt);
            }
            for (std::size_t i = 0; i < primary.size(); ++i) {
                double v = detail::eval2(primary[i], b, policy).value;
                rep.max_residual[i] = std::max(rep.max_residual[i], std::abs(v));
            }
        }
    }
    return rep;
}

// CSV export: header "t,<coordinate names>", one row per sample, 17
// significant digits.
inline void write_csv(const std::string& path, const SymbolTable& T,
                      const Trajectory& tr)
{
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot open csv output file: " + path);
    out << "t";
    for (int j = 0; j < T.dimension(); ++j)
        out << "," << T.coordinate(j)->name;
    out << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (std::size_t s = 0; s < tr.t.size(); ++s) {
        put(tr.t[s]);
        for (double v : tr.q[s]) {
            out << ",";
            put(v);
        }
        out << "\n";
    }
}

} // namespace avlag
