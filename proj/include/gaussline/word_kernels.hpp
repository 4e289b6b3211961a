#pragma once

#include "gaussline/config.hpp"
#include "gaussline/contfrac.hpp"
#include "gaussline/potential.hpp"

#include <cstdint>
#include <vector>

namespace gaussline {

// sum_{|a| = m} exp(S_m phi(a^inf)) for m = depth_min..depth over a finite
// digit set, stored as exp(shift) * scaled to stay inside double range.
struct PressureSums {
    int depth_min = 1;
    std::vector<double> shifts;      // index m - depth_min
    std::vector<double> scaled_sums; // index m - depth_min
    std::uint64_t words = 0;
};

// Parallel enumeration kernel.  The periodic point of T_a is the attracting
// fixed point of the Moebius map with matrix [[p_prev, p], [q_prev, q]], so
// |T_a'(x*)| = 1 / lambda^2 with lambda its Perron eigenvalue
// (tau + sqrt(tau^2 - 4 det)) / 2, tau = p_prev + q, det = (-1)^n.
// Words are split by their first few digits (enough prefixes to reach
// `limits.partitions`); partial sums are combined in prefix order.
PressureSums pressure_sums(const LinearForm& form, const std::vector<Digit>& digits, int depth, int depth_min,
                           const Limits& limits);

} // namespace gaussline
