#pragma once

#include "gaussline/bigint.hpp"
#include "gaussline/contfrac.hpp"
#include "gaussline/digit_law.hpp"
#include "gaussline/potential.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gaussline {

struct BernoulliModel {
    DigitLaw law;
    // Digits above this are dropped by enumeration-based consumers; their
    // mass is carried as truncation error.
    std::optional<Digit> truncate_at;
};

struct FinitePotentialModel {
    Potential potential;
    Alphabet alphabet;
    double gibbs_constant = 1.0;
    LinearForm form;
};

struct LebesgueModel {};
struct GaussModel {};

class MeasureModel {
public:
    using Kind = std::variant<BernoulliModel, FinitePotentialModel, LebesgueModel, GaussModel>;

    static MeasureModel minkowski();
    static MeasureModel lebesgue();
    static MeasureModel gauss();
    static MeasureModel bernoulli(DigitLaw law, std::optional<Digit> truncate_at = std::nullopt);
    static MeasureModel bernoulli(std::vector<double> probs);
    // Gibbs-type model of a potential on a finite alphabet; the Gibbs constant
    // is estimated from the distortion of depth-`probe_depth` weights.
    static MeasureModel finite_potential(Potential phi, Alphabet alphabet, int probe_depth = 8);

    const Kind& kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool is_minkowski() const;
    bool finite_support() const;
    // Sorted digits carrying mass when the support is finite.
    std::vector<Digit> support() const;
    // Mass dropped by a declared truncation (0 when none).
    double truncated_mass() const;

private:
    MeasureModel(Kind k, std::string name) : kind_(std::move(k)), name_(std::move(name)) {}
    Kind kind_;
    std::string name_;
};

// Grammar: minkowski | lebesgue | gauss | bernoulli:p1,p2,... |
//          bernoulli-tail:geometric:r:amax | bernoulli-tail:power:kappa:amax |
//          potential:tlog:s:alphabet
MeasureModel parse_model(const std::string& spec);

// Point at which FinitePotential weights are pinned: w_a = exp(S_n phi(T_a(x0))).
inline constexpr double kWeightPoint = 0.5;

double cylinder_mass(const MeasureModel& model, const Word& w);
double tail_mass(const MeasureModel& model, Digit n);

// Per-node child masses used by the quadrature, cdf and samplers.  A node
// is a cylinder I_b given by its branch and mass; children are I_{bd}.
class MassRule {
public:
    // cache_digits tabulates Bernoulli digit masses for repeated use.
    explicit MassRule(const MeasureModel& model, bool cache_digits = true);

    bool finite() const { return finite_; }
    // Digits with positive mass (finite support only).
    const std::vector<Digit>& digits() const { return digits_; }
    // Mass of I_{bd}.
    double child(const Branch& b, double mass, Digit d) const;
    // Mass of the union of I_{be} over e >= d.
    double tail(const Branch& b, double mass, Digit d) const;
    // Masses of all children in digits() order (finite support only).
    void children(const Branch& b, double mass, std::vector<double>& out) const;
    // Digits beyond the model's truncation point are not refined.
    Digit last_digit() const { return last_digit_; }

private:
    static constexpr Digit kCachedDigits = 256;

    const MeasureModel* model_;
    std::vector<double> prob_; // Bernoulli models: p_d, index d
    std::vector<double> tail_; // Bernoulli models: sum_{e >= d} p_e, index d
    bool finite_ = false;
    std::vector<Digit> digits_;
    Digit last_digit_;
};

struct DyadicRational {
    BigInt numerator;
    std::uint64_t exponent = 0; // value = numerator / 2^exponent

    DyadicRational() = default;
    DyadicRational(BigInt num, std::uint64_t exp);
    Rational value() const;
    double to_double() const;
    std::string str() const;
    friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
};

DyadicRational question_mark(const Word& w);
DyadicRational question_mark(const Rational& x);
double question_mark_approx(double x, std::size_t max_digits = 64);

Word box_inverse(const Rational& t, std::size_t max_digits);
Word box_inverse(const DyadicRational& t, std::size_t max_digits);
double box_inverse_value(double t, std::size_t max_digits = 64);

struct CdfValue {
    double value;
    double error;
};

CdfValue cdf(const MeasureModel& model, const Rational& x, int depth);
CdfValue cdf(const MeasureModel& model, double x, int depth);

// Exact rational equal to a finite double.
Rational exact_rational(double x);

} // namespace gaussline
