#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace bell {

using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

inline double to_double(const Rat& q) { return q.template convert_to<double>(); }

// The mpz string constructor treats a leading zero as an octal prefix, so
// integer literals are validated and stripped of leading zeros first.
inline Int parse_integer(const std::string& s) {
    std::size_t pos = (!s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
    if (pos == s.size()) throw std::invalid_argument("bad integer literal: " + s);
    for (std::size_t i = pos; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("bad integer literal: " + s);
    std::size_t nz = s.find_first_not_of('0', pos);
    if (nz == std::string::npos) return Int(0);
    Int v(s.substr(nz));
    return s[0] == '-' ? Int(-v) : v;
}

// Parses "p", "p/q" or a finite decimal like "-0.25" into an exact rational.
inline Rat parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num = parse_integer(s.substr(0, slash));
        Int den = parse_integer(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("rational with zero denominator: " + s);
        return Rat(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(parse_integer(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    if (digits == "-" || digits == "+") throw std::invalid_argument("bad rational literal: " + s);
    Int den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rat(parse_integer(digits), den);
}

inline std::string format_rational(const Rat& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

// Scales a rational vector to coprime integers with positive leading scale.
inline std::vector<Rat> primitive_integer_vector(std::vector<Rat> v) {
    Int l = 1;
    for (const auto& q : v) l = lcm(l, denominator(q));
    Int g = 0;
    for (auto& q : v) {
        q *= l;
        g = gcd(g, numerator(q));
    }
    if (g > 1)
        for (auto& q : v) q /= g;
    return v;
}

}  // namespace bell
