#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace pel {

/// Exact rational number used for probabilities and numeric atom locations.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer "k", or a finite decimal "0.125" exactly.
/// Throws std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" text ("k" when the denominator is 1).
std::string format_rational(const Rational& value);

/// Exact conversion of a finite double (every double is a dyadic rational).
Rational rational_from_double(double value);

long double to_long_double(const Rational& value);

}  // namespace pel
