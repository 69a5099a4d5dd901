#pragma once

/**
 * @file rational.hpp
 * @brief Exact rational scalars and the two scalar types used by the library.
 *
 * Every circle-geometry routine is a template over `Scalar`, which is either
 * `double` (fast path) or `Rational` (GMP-backed, exact). Exact arithmetic
 * is what makes boundary-tight bias assertions meaningful.
 */

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

#include "circbias/errors.hpp"

namespace circbias {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar T>
inline constexpr bool is_exact_v = std::same_as<T, Rational>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Floor division toward minus infinity.
inline Integer floor_int(const Rational& q) {
    const Integer num = boost::multiprecision::numerator(q);
    const Integer den = boost::multiprecision::denominator(q);
    Integer quot = num / den;
    if (num < 0 && quot * den != num) quot -= 1;
    return quot;
}

inline Integer ceil_int(const Rational& q) { return -floor_int(-q); }

inline bool is_integer(const Rational& q) {
    return boost::multiprecision::denominator(q) == 1;
}

/// Fractional part {x} = x - floor(x), always in [0, 1).
inline double frac(double x) {
    if (!std::isfinite(x)) throw InvalidArgument("frac: non-finite input");
    double f = x - std::floor(x);
    // x slightly below an integer can round up to exactly 1.
    if (f >= 1.0) f = 0.0;
    return f;
}

inline Rational frac(const Rational& q) { return q - Rational(floor_int(q)); }

/**
 * Parse an exact decimal ("-0.125", "3", "2.5e-3") or a fraction ("7/12").
 * Throws InvalidArgument on anything else.
 */
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { throw InvalidArgument("not an exact rational literal: '" + std::string(text) + "'"); };
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const Rational num = parse_rational(text.substr(0, slash));
        const Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }

    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';

    Integer mantissa = 0;
    long long scale = 0;
    bool any_digit = false;
    bool seen_point = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mantissa = mantissa * 10 + (c - '0');
            any_digit = true;
            if (seen_point) --scale;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) fail();

    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E') fail();
        ++pos;
        bool exp_negative = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) exp_negative = text[pos++] == '-';
        if (pos >= text.size()) fail();
        long long exponent = 0;
        for (; pos < text.size(); ++pos) {
            if (!std::isdigit(static_cast<unsigned char>(text[pos]))) fail();
            exponent = exponent * 10 + (text[pos] - '0');
            if (exponent > 100000) fail();
        }
        scale += exp_negative ? -exponent : exponent;
    }

    Rational value(mantissa);
    Integer power = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
    if (scale < 0) value /= Rational(power);
    else value *= Rational(power);
    return negative ? Rational(-value) : value;
}

/// "p/q" or "p" when the denominator is one.
inline std::string to_string(const Rational& q) { return q.str(); }

/// Terminating decimal expansion if one exists (denominator 2^a 5^b).
inline bool decimal_string(const Rational& q, std::string& out) {
    Integer den = boost::multiprecision::denominator(q);
    unsigned twos = 0, fives = 0;
    while (den % 2 == 0) { den /= 2; ++twos; }
    while (den % 5 == 0) { den /= 5; ++fives; }
    if (den != 1) return false;
    const unsigned digits = twos > fives ? twos : fives;
    const Integer scaled = boost::multiprecision::numerator(q) *
                           boost::multiprecision::pow(Integer(10), digits) /
                           boost::multiprecision::denominator(q);
    const bool negative = scaled < 0;
    std::string body = (negative ? Integer(-scaled) : scaled).str();
    if (digits > 0) {
        if (body.size() <= digits) body.insert(0, digits - body.size() + 1, '0');
        body.insert(body.size() - digits, ".");
    }
    out = (negative ? "-" : "") + body;
    return true;
}

inline Integer gcd(const Integer& a, const Integer& b) { return boost::multiprecision::gcd(a, b); }

inline Integer lcm(const Integer& a, const Integer& b) {
    if (a == 0 || b == 0) return 0;
    return boost::multiprecision::lcm(a, b);
}

} // namespace circbias
