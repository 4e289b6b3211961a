#include "gaussline/errors.hpp"
#include "gaussline/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace gaussline {

namespace {

struct Mobius {
    double p_prev, p, q_prev, q;

    double at(double x) const { return (p_prev * x + p) / (q_prev * x + q); }
    double denom(double x) const { return q_prev * x + q; }
};

Mobius mobius_of(const ConvergentQuad& c)
{
    return {to_double(Rational(c.p_prev)), to_double(Rational(c.p)), to_double(Rational(c.q_prev)),
            to_double(Rational(c.q))};
}

std::complex<double> composite_simpson(const Mobius& ta, const Mobius& tb, double xi, int intervals)
{
    const double h = 1.0 / intervals;
    auto g = [&](double x) {
        const double psi = xi * (ta.at(x) - tb.at(x));
        return std::polar(1.0, 2.0 * std::numbers::pi * (psi - std::floor(psi)));
    };
    std::complex<double> sum = g(0.0) + g(1.0);
    for (int i = 1; i < intervals; ++i) {
        sum += (i % 2 ? 4.0 : 2.0) * g(i * h);
    }
    return sum * (h / 3.0);
}

} // namespace

StationaryPhaseReport stationary_phase_check(const Word& word_a, const Word& word_b, double xi, int quad_points)
{
    if (word_a.size() != word_b.size()) {
        throw DomainError("stationary_phase_check: words of lengths " + std::to_string(word_a.size()) + " and " +
                          std::to_string(word_b.size()));
    }
    if (word_a.size() < 2) {
        throw DomainError("stationary_phase_check: words need length >= 2");
    }
    if (quad_points < 1000) {
        throw DomainError("stationary_phase_check: at least 1000 quadrature points are required");
    }
    const ConvergentQuad ca = continuants(word_a);
    const ConvergentQuad cb = continuants(word_b);
    StationaryPhaseReport r;
    r.word_a = word_a;
    r.word_b = word_b;
    r.xi = xi;
    r.alpha1 = ca.q_prev - cb.q_prev;
    r.alpha2 = ca.q - cb.q;

    const Mobius ta = mobius_of(ca);
    const Mobius tb = mobius_of(cb);
    const double ax = std::abs(xi);

    // phi(x) = +-xi N(x) / (D_a(x)^2 D_b(x)^2) with N = D_a + D_b; N and
    // both D are increasing and positive on [0,1].
    const double n0 = ta.denom(0.0) + tb.denom(0.0);
    const double n1 = ta.denom(1.0) + tb.denom(1.0);
    const double dn = ta.q_prev + tb.q_prev;
    const double da0 = ta.denom(0.0);
    const double db0 = tb.denom(0.0);
    const double da1 = ta.denom(1.0);
    const double db1 = tb.denom(1.0);
    const double low4 = da0 * da0 * db0 * db0;
    r.a = ax * n0 / (da1 * da1 * db1 * db1);
    const double max_phi = ax * n1 / low4;
    const double max_dphi = ax * (dn / low4 + n1 * 2.0 * (ta.q_prev / da0 + tb.q_prev / db0) / low4);
    r.b = std::max(max_phi, max_dphi);
    if (!(r.b > r.a)) {
        r.b = std::nextafter(r.a, std::numeric_limits<double>::infinity());
    }

    // Resolve the oscillation: |psi'| <= |xi| (|T_a'| + |T_b'|) <= |xi| (q_a^-2 + q_b^-2).
    const double max_dpsi = ax * (1.0 / (da0 * da0) + 1.0 / (db0 * db0));
    double want = std::max(static_cast<double>(quad_points), 64.0 * max_dpsi);
    want = std::min(want, static_cast<double>(1 << 22));
    int intervals = static_cast<int>(std::ceil(want));
    intervals += intervals % 2;
    const std::complex<double> coarse = composite_simpson(ta, tb, xi, intervals);
    const std::complex<double> fine = composite_simpson(ta, tb, xi, 2 * intervals);
    const std::complex<double> extrapolated = fine + (fine - coarse) / 15.0;
    r.integral_abs = std::abs(extrapolated);
    r.integral_error = std::abs(fine - coarse) / 15.0;

    const double alpha1 = to_double(Rational(r.alpha1));
    const double alpha2 = to_double(Rational(r.alpha2));
    if (r.a > 0.0 && alpha1 != 0.0) {
        r.bound_case1 = 6.0 * r.b * std::pow(r.a, -1.5) / std::sqrt(std::abs(alpha1));
        r.holds_case1 = r.integral_abs <= *r.bound_case1 + r.integral_error;
    }
    if (r.a > 0.0 && alpha2 != 0.0 && 2.0 * std::abs(alpha1) <= std::abs(alpha2)) {
        r.bound_case2 = 8.0 / std::abs(alpha2) * (1.0 / r.a + r.b / (r.a * r.a));
        r.holds_case2 = r.integral_abs <= *r.bound_case2 + r.integral_error;
    }
    return r;
}

} // namespace gaussline
