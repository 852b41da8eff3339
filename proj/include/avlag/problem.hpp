#pragma once

#include "avlag/geometry.hpp"
#include "avlag/parse.hpp"

#include "json.hpp"

#include <fstream>
#include <memory>
#include <string>

namespace avlag {

using Json = nlohmann::json;

// A loaded problem: the symbol table (owned, address-stable) plus the affine
// Lagrangian built over it and the original spec for echoing into reports.
struct Problem {
    std::unique_ptr<SymbolTable> table;
    AffineLagrangian lag;
    std::string name;
    Json spec_echo;
};

namespace detail {

inline bool valid_identifier(const std::string& s)
{
    if (s.empty())
        return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

// Accepts "x > 0" (positive) and "x != 0" (nonzero).
inline void apply_domain_assumption(SymbolTable& T, const std::string& text)
{
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
    };
    skip_ws();
    std::size_t start = i;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        ++i;
    std::string name = text.substr(start, i - start);
    skip_ws();
    Assumption a;
    if (text.compare(i, 1, ">") == 0) {
        a = Assumption::Positive;
        i += 1;
    } else if (text.compare(i, 2, "!=") == 0) {
        a = Assumption::Nonzero;
        i += 2;
    } else {
        throw InputError("unsupported domain assumption: " + text +
                         " (expected '<name> > 0' or '<name> != 0')");
    }
    skip_ws();
    if (i >= text.size() || text[i] != '0')
        throw InputError("domain assumption must compare against 0: " + text);
    ++i;
    skip_ws();
    if (i != text.size())
        throw InputError("trailing input in domain assumption: " + text);
    if (!valid_identifier(name))
        throw InputError("domain assumption names no symbol: " + text);
    T.set_assumption(name, a);
}

inline Assumption parse_assumption(const std::string& s)
{
    if (s == "real")
        return Assumption::Real;
    if (s == "positive")
        return Assumption::Positive;
    if (s == "nonzero")
        return Assumption::Nonzero;
    throw InputError("unknown parameter assumption: " + s +
                     " (expected real, positive, or nonzero)");
}

} // namespace detail

// Builds a Problem from parsed JSON.  Every malformation is reported as
// InputError with a message naming the offending field.
inline Problem problem_from_json(const Json& j)
{
    if (!j.is_object())
        throw InputError("problem file must contain a JSON object");
    static const char* known[] = {"name",           "autonomous",
                                  "time",           "coordinates",
                                  "parameters",     "domain_assumptions",
                                  "one_form",       "hamiltonian"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || it.key() == k;
        if (!ok)
            throw InputError("unknown field in problem file: " + it.key());
    }

    Problem P;
    P.spec_echo = j;
    P.table = std::make_unique<SymbolTable>();
    SymbolTable& T = *P.table;

    try {
        P.name = j.value("name", std::string("unnamed"));

        bool has_time = j.contains("time");
        if (has_time) {
            if (!j.at("time").is_string())
                throw InputError("field 'time' must be a string");
            T.add_time(j.at("time").get<std::string>());
        }
        bool autonomous = j.value("autonomous", !has_time);

        if (!j.contains("coordinates") || !j.at("coordinates").is_array() ||
            j.at("coordinates").empty())
            throw InputError("field 'coordinates' must be a non-empty array");
        for (const auto& c : j.at("coordinates")) {
            if (!c.is_string() ||
                !detail::valid_identifier(c.get<std::string>()))
                throw InputError("coordinate names must be valid identifiers");
            T.add_coordinate(c.get<std::string>());
        }

        if (j.contains("parameters")) {
            for (const auto& p : j.at("parameters")) {
                if (p.is_string()) {
                    T.add_parameter(p.get<std::string>(), Assumption::Real);
                    continue;
                }
                if (!p.is_object() || !p.contains("name"))
                    throw InputError(
                        "parameters must be names or {name, assumption} objects");
                Assumption a = detail::parse_assumption(
                    p.value("assumption", std::string("real")));
                T.add_parameter(p.at("name").get<std::string>(), a);
            }
        }

        if (j.contains("domain_assumptions"))
            for (const auto& d : j.at("domain_assumptions"))
                detail::apply_domain_assumption(T, d.get<std::string>());

        const bool has_form = j.contains("one_form");
        const bool has_ham = j.contains("hamiltonian");
        if (has_form == has_ham)
            throw InputError(
                "exactly one of 'one_form' or 'hamiltonian' must be present");

        if (has_form) {
            const Json& f = j.at("one_form");
            if (!f.contains("m") || !f.at("m").is_array())
                throw InputError("field 'one_form.m' must be an array");
            if (f.at("m").size() != static_cast<std::size_t>(T.dimension()))
                throw InputError("one_form.m must list exactly " +
                                 std::to_string(T.dimension()) +
                                 " expressions, got " +
                                 std::to_string(f.at("m").size()));
            std::vector<Expr> m;
            for (const auto& s : f.at("m"))
                m.push_back(parse_expression(s.get<std::string>(), T));
            Expr V = f.contains("V")
                         ? parse_expression(f.at("V").get<std::string>(), T)
                         : zero();
            P.lag = make_affine(T, std::move(m), V, autonomous);
        } else {
            const Json& h = j.at("hamiltonian");
            if (!h.contains("H") || !h.contains("pairs"))
                throw InputError("field 'hamiltonian' needs 'H' and 'pairs'");
            int pairs = h.at("pairs").get<int>();
            if (pairs < 1 ||
                2 * pairs != T.dimension())
                throw InputError(
                    "hamiltonian.pairs must be half the coordinate count");
            Expr H = parse_expression(h.at("H").get<std::string>(), T);
            P.lag = from_hamiltonian(T, H, pairs);
            if (j.contains("autonomous") && autonomous && !P.lag.autonomous)
                throw InputError("hamiltonian depends on time but the problem "
                                 "is declared autonomous");
            if (j.contains("autonomous"))
                P.lag.autonomous = autonomous;
            validate_form(P.lag);
        }
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed problem file: ") + e.what());
    }
    return P;
}

inline Problem load_problem(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open problem file: " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw InputError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return problem_from_json(j);
}

} // namespace avlag
