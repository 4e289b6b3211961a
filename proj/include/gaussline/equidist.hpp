#pragma once

#include "gaussline/bigint.hpp"
#include "gaussline/measure.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace gaussline {

// s_k = base^k (k = 1..length) or an explicit strictly increasing sequence.
class OrbitSpec {
public:
    enum class Kind { PowerBase, ExplicitSequence };

    static OrbitSpec power_base(std::uint64_t base, std::size_t length);
    static OrbitSpec explicit_sequence(std::vector<std::uint64_t> s);

    Kind kind() const { return kind_; }
    std::uint64_t base() const { return base_; }
    std::size_t length() const { return length_; }
    const std::vector<std::uint64_t>& sequence() const { return seq_; }
    // s_k as an exact integer, k = 1..length.
    BigInt term(std::size_t k) const;

private:
    Kind kind_ = Kind::PowerBase;
    std::uint64_t base_ = 2;
    std::size_t length_ = 0;
    std::vector<std::uint64_t> seq_;
};

// frac(s_k x) for k = 1..N, within a few ulps of the exact value.
// Power-base orbits read the base-b expansion of x, so x should carry at
// least N + 64 exact digits (a double only has 53 bits in base 2).
std::vector<double> orbit_points(const Rational& x, const OrbitSpec& spec, std::size_t N);

// (1/N) sum_{k<=N} exp(2 pi i p s_k x)
std::complex<double> weyl_sum(const Rational& x, const OrbitSpec& spec, std::int64_t p, std::size_t N);
std::complex<double> weyl_sum(double x, const OrbitSpec& spec, std::int64_t p, std::size_t N);
std::complex<double> weyl_sum(const std::vector<double>& orbit, std::int64_t p);

// Exact D*_N of points taken mod 1.
double star_discrepancy(std::vector<double> points);

// 3 (1/(K+1) + sum_k |W_k|/k) for W_1..W_K.
double erdos_turan_bound(const std::vector<std::complex<double>>& weyl_values);

struct DelSums {
    std::vector<double> terms;   // N^-3 sum_{k,m<=N} Re mu^(p (s_k - s_m)), N = 1..N_max
    std::vector<double> partial; // running sums of terms
    std::size_t evaluations = 0; // distinct frequencies passed to mu_hat
};

DelSums del_partial_sums(const std::function<std::complex<double>(double)>& mu_hat, const OrbitSpec& spec,
                         std::int64_t p, std::size_t N_max);

// A point distributed by the model, exact to about 2^-bits.
Rational sample_point(const MeasureModel& model, std::uint64_t seed, std::uint64_t index, double bits);

struct NormalitySummary {
    std::vector<double> discrepancies;
    double mean = 0.0;
    double median = 0.0;
    double q90 = 0.0;
    double max = 0.0;
};

NormalitySummary normality_experiment(const MeasureModel& model, std::uint64_t base, std::size_t n_samples,
                                      std::size_t N, std::uint64_t seed);

} // namespace gaussline
