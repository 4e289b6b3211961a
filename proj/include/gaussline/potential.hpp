#pragma once

#include "gaussline/contfrac.hpp"
#include "gaussline/digit_law.hpp"

#include <variant>
#include <vector>

namespace gaussline {

class Alphabet {
public:
    enum class Kind { Finite, TruncatedNaturals };

    static Alphabet finite(std::vector<Digit> digits);
    static Alphabet first_n(Digit n) ;
    // {1..a_max}; tail_bound is the mass the caller accepts losing beyond a_max.
    static Alphabet truncated(Digit a_max, double tail_bound);

    Kind kind() const { return kind_; }
    const std::vector<Digit>& digits() const { return digits_; }
    std::size_t size() const { return digits_.size(); }
    Digit max_digit() const { return digits_.back(); }
    bool contains(Digit d) const;
    double tail_bound() const { return tail_bound_; }

private:
    Kind kind_ = Kind::Finite;
    std::vector<Digit> digits_;
    double tail_bound_ = 0.0;
};

Alphabet parse_alphabet(const std::string& text);

// phi(x) = log p_{a_1(x)}
struct BernoulliLog {
    DigitLaw law;
};

// phi = -t log|T'|, i.e. phi(x) = 2 t log x
struct TLogDeriv {
    double t = 1.0;
};

struct ComboTerm;
struct Combo {
    std::vector<ComboTerm> terms;
};

class Potential {
public:
    using Kind = std::variant<BernoulliLog, TLogDeriv, Combo>;

    Potential(BernoulliLog b) : kind_(std::move(b)) {}
    Potential(TLogDeriv t) : kind_(t) {}
    Potential(Combo c) : kind_(std::move(c)) {}

    static Potential zero() { return Potential(TLogDeriv{0.0}); }
    static Potential bernoulli(DigitLaw law) { return Potential(BernoulliLog{std::move(law)}); }
    static Potential tlog(double t) { return Potential(TLogDeriv{t}); }

    const Kind& kind() const { return kind_; }

    // phi(x) for x in (0,1).
    double operator()(double x) const;

private:
    Kind kind_;
};

struct ComboTerm {
    double coefficient;
    Potential potential;
};

// Every supported potential is affine in the two primitive families:
//     phi(x) = sum_j c_j log p_j(a_1(x)) + 2 t log x.
// Birkhoff sums along T_a(x) then split into a digit sum and t log|T_a'(x)|.
struct LinearForm {
    std::vector<std::pair<double, DigitLaw>> laws;
    double t = 0.0;

    double digit_term(Digit a) const;
    bool has_digit_term() const { return !laws.empty(); }
};

LinearForm linearize(const Potential& phi);

// S_n phi(T_w(x)).
double birkhoff_sum(const Potential& phi, const Word& w, double x);
double birkhoff_sum(const LinearForm& form, const Word& w, double x);

} // namespace gaussline
