#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace poppkit {

/// Arbitrary-precision rational in canonical form (GMP keeps results of
/// arithmetic reduced with a positive denominator).
using Rational = mpq_class;
using Integer = mpz_class;

/// A point of a coordinate chart.
using Point = std::vector<Rational>;

Rational make_rational(long numerator, long denominator = 1);

/// Parses "p" or "p/q" with optional leading sign. Throws ParseError.
Rational parse_rational(std::string_view text);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

std::string to_string(const Point& p);

}  // namespace poppkit
