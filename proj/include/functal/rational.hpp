#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace functal {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "p/q", "p", or "-p/q". Throws std::invalid_argument on malformed input
// or zero denominator.
Rational parse_rational(const std::string& text);

// Renders as "p/q", or "p" when the denominator is one.
std::string rational_to_string(const Rational& value);

double to_double(const Rational& value);

// Nearest rational with denominator <= max_denominator (continued-fraction
// convergents). Used to recover exact eigenvalue candidates from numeric roots.
Rational rationalize(double value, const BigInt& max_denominator);

}  // namespace functal
