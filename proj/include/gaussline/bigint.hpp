#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace gaussline {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// num/den rounded to double without overflow for operands of any size.
double ratio_to_double(const BigInt& num, const BigInt& den);
double to_double(const Rational& r);
double log_of(const BigInt& v);

// Parses "a/b", "a" or a decimal literal such as "0.3" into an exact rational.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);

} // namespace gaussline
