#pragma once

#include "avlag/error.hpp"

#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace avlag {

enum class SymbolKind : unsigned char {
    Time,
    Coordinate,
    Velocity,
    Acceleration,
    Parameter,
    Momentum,     // conjugate momenta for the Legendre picture
    Jet,          // gauge parameter g and its time derivatives
    FreeFunction, // undetermined functions C1, C2, ... in constrained dynamics
};

enum class Assumption : unsigned char { Real, Positive, Nonzero };

struct Symbol {
    std::string name;
    SymbolKind kind = SymbolKind::Parameter;
    Assumption assumption = Assumption::Real;
    int index = -1;              // coordinate slot, jet order, ... (-1 when n/a)
    const Symbol* dot = nullptr; // total-time-derivative successor (q -> v -> a)
    std::uint32_t uid = 0;       // dense id within the owning table
};

// Registry of the symbols of one problem.  Expressions hold raw Symbol
// pointers, so the table must outlive every expression built against it;
// std::deque storage keeps the pointers stable as symbols are added.
class SymbolTable {
public:
    SymbolTable() = default;
    SymbolTable(const SymbolTable&) = delete;
    SymbolTable& operator=(const SymbolTable&) = delete;

    const Symbol* add_time(const std::string& name)
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (time_)
            throw InputError("time symbol already declared");
        time_ = intern(name, SymbolKind::Time, Assumption::Real, 0);
        return time_;
    }

    // Declares a configuration coordinate together with its velocity and
    // acceleration symbols ("x" -> "v_x" -> "a_x").
    const Symbol* add_coordinate(const std::string& name,
                                 Assumption a = Assumption::Real)
    {
        std::lock_guard<std::mutex> lock(mu_);
        int i = static_cast<int>(coords_.size());
        Symbol* q = intern(name, SymbolKind::Coordinate, a, i);
        Symbol* v = intern("v_" + name, SymbolKind::Velocity, Assumption::Real, i);
        Symbol* acc = intern("a_" + name, SymbolKind::Acceleration, Assumption::Real, i);
        q->dot = v;
        v->dot = acc;
        coords_.push_back(q);
        vels_.push_back(v);
        accels_.push_back(acc);
        return q;
    }

    const Symbol* add_parameter(const std::string& name,
                                Assumption a = Assumption::Real)
    {
        std::lock_guard<std::mutex> lock(mu_);
        Symbol* p = intern(name, SymbolKind::Parameter, a,
                           static_cast<int>(params_.size()));
        params_.push_back(p);
        return p;
    }

    // Conjugate momentum "p_<coordinate>", created on first use.
    const Symbol* momentum(int i)
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (i < 0 || i >= static_cast<int>(coords_.size()))
            throw Error("momentum index out of range");
        momenta_.resize(coords_.size(), nullptr);
        if (!momenta_[i])
            momenta_[i] = intern("p_" + coords_[i]->name, SymbolKind::Momentum,
                                 Assumption::Real, i);
        return momenta_[i];
    }

    // Gauge parameter jets g, gdot, gddot (order 0, 1, 2).
    const Symbol* jet(int order)
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (order < 0 || order > 2)
            throw Error("jet order out of range");
        static const char* names[3] = {"g", "gdot", "gddot"};
        for (int k = 0; k <= order; ++k) {
            if (!jets_[k]) {
                jets_[k] = intern(names[k], SymbolKind::Jet, Assumption::Real, k);
                if (k > 0)
                    jets_[k - 1]->dot = jets_[k];
            }
        }
        return jets_[order];
    }

    // Undetermined function C<k+1> of an underdetermined flow.
    const Symbol* free_function(int k)
    {
        std::lock_guard<std::mutex> lock(mu_);
        while (static_cast<int>(frees_.size()) <= k) {
            std::string nm = "C" + std::to_string(frees_.size() + 1);
            frees_.push_back(intern(nm, SymbolKind::FreeFunction, Assumption::Real,
                                    static_cast<int>(frees_.size())));
        }
        return frees_[k];
    }

    const Symbol* time() const
    {
        if (!time_)
            throw Error("no time symbol declared");
        return time_;
    }
    bool has_time() const { return time_ != nullptr; }

    int dimension() const { return static_cast<int>(coords_.size()); }
    const Symbol* coordinate(int i) const { return coords_.at(i); }
    const Symbol* velocity(int i) const { return vels_.at(i); }
    const Symbol* acceleration(int i) const { return accels_.at(i); }

    std::vector<const Symbol*> coordinates() const
    {
        return {coords_.begin(), coords_.end()};
    }
    std::vector<const Symbol*> parameters() const
    {
        return {params_.begin(), params_.end()};
    }

    const Symbol* find(const std::string& name) const
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = byname_.find(name);
        return it == byname_.end() ? nullptr : it->second;
    }

    const Symbol* require(const std::string& name) const
    {
        const Symbol* s = find(name);
        if (!s)
            throw InputError("unknown symbol '" + name + "'");
        return s;
    }

    void set_assumption(const std::string& name, Assumption a)
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = byname_.find(name);
        if (it == byname_.end())
            throw InputError("assumption references unknown symbol '" + name + "'");
        it->second->assumption = a;
    }

    std::size_t size() const
    {
        std::lock_guard<std::mutex> lock(mu_);
        return pool_.size();
    }

private:
    Symbol* intern(const std::string& name, SymbolKind kind, Assumption a, int index)
    {
        static const char* reserved[] = {"ln", "exp", "sin", "cos", "sqrt"};
        for (const char* r : reserved)
            if (name == r)
                throw InputError("'" + name + "' is a reserved function name");
        if (name.empty())
            throw InputError("empty symbol name");
        if (byname_.count(name))
            throw InputError("duplicate symbol '" + name + "'");
        pool_.push_back(Symbol{name, kind, a, index, nullptr,
                               static_cast<std::uint32_t>(pool_.size())});
        Symbol* s = &pool_.back();
        byname_.emplace(name, s);
        return s;
    }

    mutable std::mutex mu_;
    std::deque<Symbol> pool_;
    std::unordered_map<std::string, Symbol*> byname_;
    std::vector<Symbol*> coords_, vels_, accels_, params_;
    std::vector<Symbol*> momenta_;
    Symbol* jets_[3] = {nullptr, nullptr, nullptr};
    std::vector<Symbol*> frees_;
    Symbol* time_ = nullptr;
};

} // namespace avlag
