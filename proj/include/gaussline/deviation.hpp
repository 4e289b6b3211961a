#pragma once

#include "gaussline/config.hpp"
#include "gaussline/contfrac.hpp"
#include "gaussline/measure.hpp"
#include "gaussline/potential.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gaussline {

// A_k(eps) = { x : |S_k psi(x)/k + lambda| < eps and |S_k phi(x)/S_k psi(x) - s| < eps }
// with psi = -log|T'|.  R_n keeps the words whose prefixes of length
// floor(n/2)..n all have cylinders inside A_k(eps).
struct RegularParams {
    double epsilon = 0.1;
    double lambda = 0.0;
    double s = 1.0;
    int n = 1;

    void validate() const;
};

// Cylinder inclusion in A_k(eps) is tested at both endpoints of I_{w|k}.
bool regular_membership(const Potential& phi, const Word& word, const RegularParams& params);

// The four comparisons that membership implies for k = floor(n/2)..n:
//   q_k^2, the cylinder length and |T'|, the weight exp(S_k phi), and the
//   cylinder mass (with the model's Gibbs constant).
// Slack is the smallest log-margin seen; negative means a violation.
struct BoundAudit {
    std::uint64_t passed = 0;
    std::uint64_t failed = 0;
    double worst_slack = 1e300;

    void record(double slack);
    void merge(const BoundAudit& o);
};

struct RegularAudit {
    std::array<BoundAudit, 4> bounds;

    bool ok() const;
    void merge(const RegularAudit& o);
};

double gibbs_constant(const MeasureModel& model);

// Never throws on failing bounds; they are reported.
RegularAudit lemma_regular_check(const Potential& phi, const MeasureModel& model, const Word& word,
                                 const RegularParams& params);

struct RegularWordSet {
    RegularParams params;
    std::vector<Word> words;
    double accepted_mass = 0.0;
    double complement_mass = 0.0;
    std::uint64_t enumerated = 0;
    RegularAudit audit;
};

// Masses come from `model`, normalised over the depth-n words of the alphabet.
RegularWordSet enumerate_regular(const Potential& phi, const Alphabet& alphabet, const RegularParams& params,
                                 const MeasureModel& model, const Limits& limits = Limits::from_environment());

struct IrregularPoint {
    int n = 0;
    double mass = 0.0;
    double lambda = 0.0;
    double s = 0.0;
    bool audit_ok = true;
};

struct IrregularCurve {
    std::vector<IrregularPoint> points;
    double slope = 0.0;     // of log(mass) against n
    double delta_hat = 0.0; // -4 * slope
};

// (lambda, s) at each n come from the thermo estimators at depth n.
IrregularCurve irregular_mass_curve(const Potential& phi, const MeasureModel& model, const Alphabet& alphabet,
                                    double epsilon, const std::vector<int>& n_range,
                                    const Limits& limits = Limits::from_environment());

struct TailExponent {
    enum class Kind { Power, Exponential, Finite };
    Kind kind = Kind::Finite;
    // Power: tail ~ n^-delta.  Exponential: tail ~ exp(-rate n), delta = +inf.
    double delta = 0.0;
    double rate = 0.0;
    double r_squared = 0.0;
};

TailExponent tail_exponent(const MeasureModel& model, const std::vector<Digit>& n_range);
std::string to_string(TailExponent::Kind k);

// Smallest even n0 meeting the proof thresholds for the given constants
// (rate delta of the large deviations at eps/2 and its threshold n1).
struct ThresholdInputs {
    double epsilon;
    double lambda;
    double s;
    double gibbs_constant;
    double delta;
    int n1;
};

int n0_threshold(const ThresholdInputs& in, int search_limit = 1 << 20);

} // namespace gaussline
