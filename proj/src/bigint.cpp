#include "gaussline/bigint.hpp"
#include "gaussline/errors.hpp"

#include <cmath>
#include <cstdint>

namespace gaussline {

namespace mp = boost::multiprecision;

double ratio_to_double(const BigInt& num, const BigInt& den)
{
    if (den == 0) {
        throw DomainError("ratio_to_double: zero denominator");
    }
    if (num == 0) {
        return 0.0;
    }
    const bool negative = (num < 0) != (den < 0);
    const BigInt n = mp::abs(num);
    const BigInt d = mp::abs(den);
    // Scale so the integer quotient carries 64-65 significant bits.
    const long long shift = 64 - (static_cast<long long>(mp::msb(n)) - static_cast<long long>(mp::msb(d)));
    BigInt quotient;
    if (shift >= 0) {
        quotient = (n << static_cast<unsigned>(shift)) / d;
    } else {
        quotient = n / (d << static_cast<unsigned>(-shift));
    }
    const double mant = quotient.convert_to<double>();
    const double value = std::ldexp(mant, static_cast<int>(-shift));
    return negative ? -value : value;
}

double to_double(const Rational& r)
{
    return ratio_to_double(mp::numerator(r), mp::denominator(r));
}

double log_of(const BigInt& v)
{
    if (v <= 0) {
        throw DomainError("log_of: nonpositive argument");
    }
    const auto bits = mp::msb(v);
    if (bits < 1000) {
        return std::log(v.convert_to<double>());
    }
    const unsigned drop = static_cast<unsigned>(bits - 60);
    const BigInt top = v >> drop;
    return std::log(top.convert_to<double>()) + static_cast<double>(drop) * std::log(2.0);
}

Rational parse_rational(const std::string& text)
{
    if (text.empty()) {
        throw DomainError("empty rational literal");
    }
    try {
        const auto slash = text.find('/');
        if (slash != std::string::npos) {
            const BigInt num(text.substr(0, slash));
            const BigInt den(text.substr(slash + 1));
            if (den == 0) {
                throw DomainError("zero denominator in '" + text + "'");
            }
            return Rational(num, den);
        }
        const auto dot = text.find('.');
        if (dot == std::string::npos) {
            return Rational(BigInt(text));
        }
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        const std::size_t decimals = text.size() - dot - 1;
        if (digits.empty() || digits == "-") {
            throw DomainError("malformed rational '" + text + "'");
        }
        BigInt den = 1;
        for (std::size_t i = 0; i < decimals; ++i) {
            den *= 10;
        }
        return Rational(BigInt(digits), den);
    } catch (const std::runtime_error&) {
        throw DomainError("malformed rational '" + text + "'");
    }
}

std::string to_string(const Rational& r)
{
    if (mp::denominator(r) == 1) {
        return mp::numerator(r).str();
    }
    return mp::numerator(r).str() + "/" + mp::denominator(r).str();
}

} // namespace gaussline
