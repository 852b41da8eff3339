#pragma once

#include "avlag/error.hpp"

#include <boost/functional/hash.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace avlag {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

// Floor division with positive divisor.
inline BigInt floor_div(const BigInt& a, const BigInt& b)
{
    BigInt q = a / b;
    if (a % b != 0 && a < 0)
        --q;
    return q;
}

inline BigInt rational_floor(const Rational& r)
{
    return floor_div(numerator(r), denominator(r));
}

inline Rational int_pow(const BigInt& base, const BigInt& n)
{
    if (n < 0)
        throw Error("int_pow: negative exponent");
    if (n > 4096)
        throw Error("int_pow: exponent too large");
    BigInt acc = boost::multiprecision::pow(base, n.convert_to<unsigned>());
    return Rational(acc);
}

inline Rational rational_pow(const Rational& base, const BigInt& n)
{
    if (n == 0)
        return Rational(1);
    BigInt k = n < 0 ? BigInt(-n) : n;
    if (k > 4096)
        throw Error("rational_pow: exponent too large");
    unsigned uk = k.convert_to<unsigned>();
    Rational r(boost::multiprecision::pow(numerator(base), uk),
               boost::multiprecision::pow(denominator(base), uk));
    if (n < 0) {
        if (r == 0)
            throw Error("rational_pow: zero to a negative power");
        r = Rational(1) / r;
    }
    return r;
}

// Exact integer n-th root of a non-negative integer, when one exists.
inline std::optional<BigInt> exact_nth_root(const BigInt& a, unsigned n)
{
    if (a < 0 || n == 0)
        return std::nullopt;
    if (a == 0 || a == 1 || n == 1)
        return a;
    double est = std::pow(a.convert_to<double>(), 1.0 / static_cast<double>(n));
    BigInt r = static_cast<long long>(est);
    if (r < 1)
        r = 1;
    auto powi = [n](const BigInt& x) { return boost::multiprecision::pow(x, n); };
    while (powi(r + 1) <= a)
        ++r;
    while (r > 0 && powi(r) > a)
        --r;
    if (powi(r) == a)
        return r;
    return std::nullopt;
}

// Exact rational n-th root of a non-negative rational, when one exists.
inline std::optional<Rational> exact_nth_root(const Rational& q, unsigned n)
{
    if (q < 0)
        return std::nullopt;
    auto rn = exact_nth_root(numerator(q), n);
    if (!rn)
        return std::nullopt;
    auto rd = exact_nth_root(denominator(q), n);
    if (!rd)
        return std::nullopt;
    return Rational(*rn, *rd);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string rational_str(const Rational& r)
{
    std::ostringstream os;
    os << numerator(r);
    if (!is_integer(r))
        os << "/" << denominator(r);
    return os.str();
}

inline std::size_t rational_hash(const Rational& r)
{
    std::size_t h = boost::hash<BigInt>{}(numerator(r));
    boost::hash_combine(h, boost::hash<BigInt>{}(denominator(r)));
    return h;
}

// Exact value of a decimal literal: "12.25" -> 49/4.
inline Rational rational_from_decimal(const std::string& digits, const std::string& frac)
{
    BigInt num(digits.empty() ? "0" : digits);
    if (frac.empty())
        return Rational(num);
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    BigInt fnum(frac);
    return Rational(num * scale + fnum, scale);
}

// gcd of |numerators| / lcm of denominators; the canonical positive scale of a
// coefficient list.  All-zero input yields 1.
inline Rational rational_content(const std::vector<Rational>& cs)
{
    BigInt g = 0, l = 1;
    for (const auto& c : cs) {
        if (c == 0)
            continue;
        BigInt n = numerator(c);
        if (n < 0)
            n = -n;
        g = boost::multiprecision::gcd(g, n);
        BigInt d = denominator(c);
        l = l / boost::multiprecision::gcd(l, d) * d;
    }
    if (g == 0)
        return Rational(1);
    return Rational(g, l);
}

} // namespace avlag
