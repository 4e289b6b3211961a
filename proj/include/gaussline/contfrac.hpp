#pragma once

#include "gaussline/bigint.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace gaussline {

using Digit = std::uint64_t;

// A finite continued-fraction word (a_1, ..., a_n), every digit >= 1.
class Word {
public:
    Word() = default;
    Word(std::initializer_list<Digit> digits);
    explicit Word(std::vector<Digit> digits);

    std::size_t size() const { return digits_.size(); }
    bool empty() const { return digits_.empty(); }
    Digit operator[](std::size_t i) const { return digits_[i]; }
    Digit back() const { return digits_.back(); }
    const std::vector<Digit>& digits() const { return digits_; }
    auto begin() const { return digits_.begin(); }
    auto end() const { return digits_.end(); }

    void push_back(Digit d);
    Word prefix(std::size_t k) const;
    Word suffix_from(std::size_t start) const;
    Word operator+(const Word& tail) const;

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;

private:
    std::vector<Digit> digits_;
};

std::string to_string(const Word& w);
// Comma separated digits; throws DomainError on anything that is not a digit >= 1.
Word parse_word(const std::string& text);

struct ConvergentQuad {
    BigInt p_prev;
    BigInt q_prev;
    BigInt p;
    BigInt q;
};

struct CylinderInterval {
    Rational low;
    Rational high;
    int orientation = 1; // (-1)^n: +1 when T_a preserves order

    Rational length() const { return high - low; }
};

struct GoldenConstants {
    double theta;
    double c0;
};

GoldenConstants golden_constants();

ConvergentQuad continuants(const Word& w);
double log_continuant(const Word& w);
Word mirror(const Word& w);
CylinderInterval cylinder(const Word& w);
Rational value_of(const Word& w);

double inverse_branch(const Word& w, double x);
double inverse_branch_derivative(const Word& w, double x);

struct GaussStep {
    Digit digit;
    double remainder;
};
struct ExactGaussStep {
    Digit digit;
    Rational remainder;
};

GaussStep gauss_step(double x);
ExactGaussStep gauss_step(const Rational& x);

Word cf_digits(double x, std::size_t max_n);
Word cf_digits(const Rational& x, std::size_t max_n);

// q(w) / (q(first n - j digits) q(last j digits)), which lies in [1, 2].
double quasi_independence_ratio(const Word& w, std::size_t j);

// Floating image of the branch T_a used inside enumeration and quadrature
// loops.  The four entries are the continuants of the word so far, carried
// as doubles; they stay exact up to 2^53, and beyond that every derived
// quantity is still accurate to a few ulps in relative terms.
struct Branch {
    double p_prev = 1.0;
    double p = 0.0;
    double q_prev = 0.0;
    double q = 1.0;
    int sign = 1; // (-1)^n
    int depth = 0;

    Branch child(Digit d) const {
        const double a = static_cast<double>(d);
        return {p, p_prev + a * p, q, q_prev + a * q, -sign, depth + 1};
    }
    double at(double x) const { return (p_prev * x + p) / (q_prev * x + q); }
    // log |T_a'(x)| = -2 log(q_prev x + q)
    double log_derivative(double x) const { return -2.0 * std::log(q_prev * x + q); }
    double length() const { return 1.0 / (q * (q + q_prev)); }
    double low() const { return sign > 0 ? p / q : (p + p_prev) / (q + q_prev); }
    double high() const { return sign > 0 ? (p + p_prev) / (q + q_prev) : p / q; }
    double midpoint() const { return 0.5 * (p / q + (p + p_prev) / (q + q_prev)); }
};

Branch branch_of(const Word& w);

} // namespace gaussline
