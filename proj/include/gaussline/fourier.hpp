#pragma once

#include "gaussline/config.hpp"
#include "gaussline/contfrac.hpp"
#include "gaussline/measure.hpp"
#include "gaussline/potential.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gaussline {

// mu^(xi) = int exp(-2 pi i xi x) dmu(x)
struct FourierPoint {
    double xi = 0.0;
    std::complex<double> value;
    double error_bound = 0.0;
    std::string method; // cylinder | montecarlo | quadrature
    std::uint64_t work = 0;
};

// exp(-2 pi i xi x), with xi * x reduced mod 1 through an exact product split
// so that large frequencies keep their phase.
std::complex<double> unit_phase(double xi, double x);

FourierPoint transform_cylinder(const MeasureModel& model, double xi, double tol,
                                const Limits& limits = Limits::from_environment());

// Empirical average over n_samples draws; error 3/sqrt(n).
FourierPoint transform_mc(const MeasureModel& model, double xi, std::uint64_t n_samples, std::uint64_t seed);

// Frequency grammar:  int:a:b  (integers a..b)
//                     log:lo:hi:per_decade  (log-spaced, endpoints included)
//                     list:x1,x2,...
std::vector<double> parse_frequencies(const std::string& spec);
std::vector<double> log_frequencies(double lo, double hi, int per_decade);

struct ScanEntry {
    FourierPoint point;
    std::optional<std::string> failure; // set when the point could not be computed
};

// One transform_cylinder per frequency, in input order.
std::vector<ScanEntry> scan(const MeasureModel& model, const std::vector<double>& frequencies, double tol,
                            const Limits& limits = Limits::from_environment());

struct DecayFit {
    double eta_hat = 0.0;
    double log_c = 0.0;
    double r_squared = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    int points_used = 0;
    int points_excluded = 0; // |value| <= error_bound inside the window
};

// Least squares of log|value| against log xi over points inside the window
// whose value clears its error bound.  Needs 8 such points spanning two
// decades; otherwise FitError.
DecayFit fit_decay(const std::vector<FourierPoint>& points, std::pair<double, double> window);

struct BootstrapInterval {
    double lo = 0.0;
    double hi = 0.0;
    int resamples = 0;
};

// Percentile interval of eta_hat under resampling of the usable points.
BootstrapInterval bootstrap_decay(const std::vector<FourierPoint>& points, std::pair<double, double> window,
                                  double confidence = 0.95, int resamples = 2000, std::uint64_t seed = 1);

struct EtaConstants {
    double eta_s;
    double rho_s;
};

EtaConstants eta_constants(double s);

// Depth n with exp((1+2s) lambda n) <= u < exp((1+2s) lambda (n+1)).
int depth_for_frequency(double u, double s, double lambda);

struct OperatorSplit {
    std::complex<double> full;
    std::complex<double> regular;
    double irregular_mass = 0.0;
    double error_bound = 0.0; // of `full` as an approximation of mu^(xi)
    std::uint64_t words = 0;
};

// Depth-n cylinder sum of mu^(xi) split by membership of the word in the
// regular set R_n for (potential, epsilon, lambda, s).
OperatorSplit transform_operator_split(const MeasureModel& model, const Potential& potential,
                                       const Alphabet& alphabet, double xi, int n, double epsilon, double lambda,
                                       double s, const Limits& limits = Limits::from_environment());

struct StationaryPhaseReport {
    Word word_a;
    Word word_b;
    double xi = 0.0;
    BigInt alpha1;
    BigInt alpha2;
    // Envelope a <= |phi| <= b, |phi'| <= b on [0,1].
    double a = 0.0;
    double b = 0.0;
    double integral_abs = 0.0;
    double integral_error = 0.0;
    std::optional<double> bound_case1;
    std::optional<double> bound_case2;
    bool holds_case1 = true;
    bool holds_case2 = true;
};

// |int_0^1 exp(2 pi i xi (T_a(x) - T_b(x))) dx| against the two stationary
// phase bounds, with alpha_1 = q_{n-1}(a) - q_{n-1}(b), alpha_2 = q_n(a) - q_n(b).
StationaryPhaseReport stationary_phase_check(const Word& word_a, const Word& word_b, double xi,
                                             int quad_points = 4096);

} // namespace gaussline
