#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace modsynth {

/// Exact rational number. Every value in the symbolic core is one of these.
using Rational = mpq_class;
using Integer = mpz_class;

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);

/// Accepts "p", "-p" and "p/q". Throws SyntaxError on anything else.
Rational parse_rational(std::string_view text);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

Integer floor(const Rational& q);
Integer ceil(const Rational& q);

Integer gcd(const Integer& a, const Integer& b);
Integer lcm(const Integer& a, const Integer& b);

/// Non-negative remainder of a modulo m (m > 0).
Integer mod(const Integer& a, const Integer& m);

/// Lossy conversion used only for timing/plot output.
inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace modsynth
