#pragma once

#include "gaussline/contfrac.hpp"
#include "gaussline/measure.hpp"

#include <cstdint>

namespace gaussline {

// Counter-based generator: the stream for (seed, index) is fixed, so samples
// can be produced in any order or in parallel with identical results.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next();
    // Uniform on (0, 1], never exactly 0.
    double uniform();

private:
    std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Midpoint of a random depth-`depth` cylinder (Bernoulli and potential
// models) or an inverse-CDF draw (Lebesgue, Gauss).
double sample(const MeasureModel& model, std::uint64_t seed, int depth = 64, std::uint64_t index = 0);

// Draws digits from the model's conditional digit law until log q_n reaches
// `min_log_q`, so that the cylinder pins the point to roughly exp(-2 min_log_q).
Word sample_word(const MeasureModel& model, CounterRng& rng, double min_log_q);

// Exact midpoint of I_w.
Rational cylinder_midpoint(const Word& w);

} // namespace gaussline
