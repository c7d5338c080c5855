#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace sca {

// Exact rational in lowest terms.
using Rational = mpq_class;
using Integer = mpz_class;

// "p/q" form; integers are written "p/1".
std::string to_string(const Rational& r);

// Accepts "p/q", "p" and optional leading '-'. Throws ParseError.
Rational parse_rational(std::string_view text);

Rational make_rational(const Integer& num, const Integer& den);

Integer pow(const Integer& base, unsigned long exp);
Rational pow(const Rational& base, unsigned long exp);

Integer lcm(const Integer& a, const Integer& b);

}  // namespace sca
