#pragma once

#include "gaussline/contfrac.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace gaussline {

// Probability law of a single continued-fraction digit: explicit weights
// p_1..p_K plus an optional analytic tail for a > K.
//
//   geometric:  p_a = scale * ratio^a
//   power:      p_a = scale * a^(-exponent)
//
// The Minkowski law p_a = 2^-a is the geometric tail with K = 0,
// scale = 1, ratio = 1/2.
struct DigitTail {
    enum class Kind { Geometric, Power };
    Kind kind = Kind::Geometric;
    double scale = 1.0;
    double ratio = 0.5;    // geometric only
    double exponent = 2.0; // power only
};

class DigitLaw {
public:
    DigitLaw() = default;
    DigitLaw(std::vector<double> explicit_probs, std::optional<DigitTail> tail = std::nullopt);

    static DigitLaw minkowski();
    // p_a = (1 - r) r^(a-1)
    static DigitLaw geometric(double r);
    // p_a = a^(-kappa) / zeta(kappa)
    static DigitLaw power(double kappa);

    double prob(Digit a) const;
    double log_prob(Digit a) const;
    // sum_{b >= a} p_b, closed form on the tail.
    double tail_from(Digit a) const;
    double total() const { return tail_from(1); }

    bool finite_support() const { return !tail_.has_value(); }
    // Largest digit with nonzero weight; numeric_limits::max() with a tail.
    Digit max_digit() const;
    std::size_t explicit_size() const { return probs_.size(); }
    const std::vector<double>& explicit_probs() const { return probs_; }
    const std::optional<DigitTail>& tail() const { return tail_; }

    // Smallest a with sum_{b <= a} p_b >= u (u in (0, total]).
    Digit inverse_cdf(double u) const;

    // -sum p_a log p_a, including the analytic tail.
    double entropy() const;
    // Same sum restricted to a <= a_max.
    double entropy_upto(Digit a_max) const;

private:
    double tail_sum(Digit a) const; // analytic part only, a > K
    std::vector<double> probs_;
    std::optional<DigitTail> tail_;
    std::vector<double> suffix_; // suffix_[i] = sum_{b >= i+1} p_b over explicit part
};

// sum_{a >= n} a^(-s), s > 1, by direct summation of a few terms plus an
// Euler-Maclaurin remainder.
double hurwitz_zeta(double s, double n);

} // namespace gaussline
