#pragma once

#include "gaussline/config.hpp"
#include "gaussline/contfrac.hpp"
#include "gaussline/measure.hpp"
#include "gaussline/potential.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace gaussline {

double periodic_point(const Word& w);

struct PressureEstimate {
    int depth = 0;
    double value = 0.0;
    // (m, (1/m) log Z_m) for m = depth/2 .. depth
    std::vector<std::pair<int, double>> sequence;
    Alphabet alphabet = Alphabet::finite({1});
    // Series tail beyond a_max (TruncatedNaturals only).
    double tail_bound = 0.0;
    std::uint64_t words = 0;
};

PressureEstimate pressure_estimate(const Potential& phi, const Alphabet& alphabet, int depth,
                                   const Limits& limits = Limits::from_environment());

// Serial reference: every word is handled on its own, with the periodic point
// found by iterating T_a and the Birkhoff sum evaluated there.
PressureEstimate pressure_estimate_reference(const Potential& phi, const Alphabet& alphabet, int depth,
                                             const Limits& limits = Limits::from_environment());

struct PressureRoot {
    double s = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int evaluations = 0;
    std::vector<std::pair<double, double>> history; // (s, P(s)) in evaluation order
};

PressureRoot pressure_root_detailed(const Alphabet& alphabet, double s_lo, double s_hi, int depth, double tol,
                                    const Limits& limits = Limits::from_environment());
double pressure_root(const Alphabet& alphabet, double s_lo, double s_hi, int depth, double tol,
                     const Limits& limits = Limits::from_environment());

struct Estimate {
    double value = 0.0;
    double error = 0.0;          // numerical error bound (quadrature, distortion)
    double truncated_mass = 0.0; // mass outside the enumerated alphabet
    std::string method;
    std::uint64_t work = 0;
};

struct StatsOptions {
    // Largest truncated mass accepted before a PrecisionError.
    double max_truncated = 1e-3;
    // Leaf tolerance of the cylinder quadrature used for invariant integrals.
    double leaf_osc = 1e-8;
    Limits limits = Limits::from_environment();
};

Estimate entropy_estimate(const MeasureModel& model, int depth, const StatsOptions& opt = {});
Estimate lyapunov_estimate(const MeasureModel& model, int depth, const StatsOptions& opt = {});
Estimate kinney_dimension(const MeasureModel& model, int depth, const StatsOptions& opt = {});

struct MeasureStats {
    double entropy_h = 0.0;
    double lyapunov_lambda = 0.0;
    double dimension_s = 0.0;
    int depth = 0;
    std::string method;
};

MeasureStats measure_stats(const MeasureModel& model, int depth, const StatsOptions& opt = {});

struct TransferResult {
    std::complex<double> value;
    // Weight lost beyond a_max plus a rounding allowance.
    double error = 0.0;
    std::uint64_t words = 0;
};

// f must be safe to call concurrently.
TransferResult transfer_apply(const Potential& phi, const Alphabet& alphabet,
                              const std::function<std::complex<double>(double)>& f, double x, int depth,
                              const Limits& limits = Limits::from_environment());

// sum_{m > a_max} exp(phi at the fixed point of T_m) estimated by truncation
// doubling; throws PrecisionError when the increments do not shrink.
double pressure_tail(const LinearForm& form, Digit a_max);

} // namespace gaussline
