#include "gaussline/equidist.hpp"
#include "gaussline/errors.hpp"
#include "gaussline/fourier.hpp"
#include "gaussline/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace gaussline {

namespace {

namespace mp = boost::multiprecision;

// Base-b digits d_1 d_2 ... of frac(x), `count` of them.
std::vector<std::uint32_t> base_digits(const Rational& x, std::uint64_t base, std::size_t count)
{
    BigInt num = mp::numerator(x);
    const BigInt den = mp::denominator(x);
    num %= den;
    if (num < 0) {
        num += den;
    }
    // Chunks of m digits with base^m < 2^62.
    std::size_t m = 0;
    std::uint64_t chunk = 1;
    while (chunk <= (std::uint64_t{1} << 62) / base) {
        chunk *= base;
        ++m;
    }
    std::vector<std::uint32_t> out;
    out.reserve(count + m);
    std::vector<std::uint32_t> block(m);
    while (out.size() < count) {
        num *= chunk;
        BigInt q;
        BigInt r;
        mp::divide_qr(num, den, q, r);
        num = std::move(r);
        auto v = q.convert_to<std::uint64_t>();
        for (std::size_t j = m; j-- > 0;) {
            block[j] = static_cast<std::uint32_t>(v % base);
            v /= base;
        }
        out.insert(out.end(), block.begin(), block.end());
    }
    out.resize(count);
    return out;
}

} // namespace

OrbitSpec OrbitSpec::power_base(std::uint64_t base, std::size_t length)
{
    if (base < 2) {
        throw DomainError("orbit base must be >= 2");
    }
    OrbitSpec s;
    s.kind_ = Kind::PowerBase;
    s.base_ = base;
    s.length_ = length;
    return s;
}

OrbitSpec OrbitSpec::explicit_sequence(std::vector<std::uint64_t> seq)
{
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] == 0 || (i > 0 && seq[i] <= seq[i - 1])) {
            throw DomainError("explicit orbit sequence must be strictly increasing positive integers");
        }
    }
    OrbitSpec s;
    s.kind_ = Kind::ExplicitSequence;
    s.length_ = seq.size();
    s.seq_ = std::move(seq);
    return s;
}

BigInt OrbitSpec::term(std::size_t k) const
{
    if (k < 1 || k > length_) {
        throw RangeError("orbit index " + std::to_string(k) + " outside 1.." + std::to_string(length_));
    }
    if (kind_ == Kind::ExplicitSequence) {
        return BigInt(seq_[k - 1]);
    }
    return mp::pow(BigInt(base_), static_cast<unsigned>(k));
}

std::vector<double> orbit_points(const Rational& x, const OrbitSpec& spec, std::size_t N)
{
    if (N > spec.length()) {
        throw RangeError("orbit length " + std::to_string(N) + " exceeds the spec length " +
                         std::to_string(spec.length()));
    }
    std::vector<double> u(N);
    if (spec.kind() == OrbitSpec::Kind::ExplicitSequence) {
        const BigInt num = mp::numerator(x);
        const BigInt den = mp::denominator(x);
        for (std::size_t k = 1; k <= N; ++k) {
            BigInt r = (num * spec.sequence()[k - 1]) % den;
            if (r < 0) {
                r += den;
            }
            u[k - 1] = ratio_to_double(r, den);
        }
        return u;
    }
    // frac(b^k x) = 0.d_{k+1} d_{k+2} ... in base b; J digits fix 64 bits.
    const std::uint64_t b = spec.base();
    const auto J = static_cast<std::size_t>(std::ceil(64.0 / std::log2(static_cast<double>(b))));
    const std::vector<std::uint32_t> d = base_digits(x, b, N + J);
    const double inv_b = 1.0 / static_cast<double>(b);
    for (std::size_t k = 1; k <= N; ++k) {
        double v = 0.0;
        for (std::size_t j = J; j >= 1; --j) {
            v = (v + d[k + j - 1]) * inv_b;
        }
        u[k - 1] = std::min(v, std::nextafter(1.0, 0.0));
    }
    return u;
}

std::complex<double> weyl_sum(const std::vector<double>& orbit, std::int64_t p)
{
    if (p == 0) {
        throw DomainError("weyl_sum: p must be nonzero");
    }
    if (orbit.empty()) {
        throw DomainError("weyl_sum: empty orbit");
    }
    std::complex<double> s{0.0, 0.0};
    const double pd = static_cast<double>(p);
    for (double u : orbit) {
        s += unit_phase(-pd, u);
    }
    return s / static_cast<double>(orbit.size());
}

std::complex<double> weyl_sum(const Rational& x, const OrbitSpec& spec, std::int64_t p, std::size_t N)
{
    if (p == 0) {
        throw DomainError("weyl_sum: p must be nonzero");
    }
    return weyl_sum(orbit_points(x, spec, N), p);
}

std::complex<double> weyl_sum(double x, const OrbitSpec& spec, std::int64_t p, std::size_t N)
{
    if (!std::isfinite(x)) {
        throw DomainError("weyl_sum: x must be finite");
    }
    return weyl_sum(exact_rational(x), spec, p, N);
}

double star_discrepancy(std::vector<double> points)
{
    if (points.empty()) {
        throw DomainError("star_discrepancy: empty point set");
    }
    for (double& u : points) {
        u -= std::floor(u);
    }
    std::sort(points.begin(), points.end());
    const double n = static_cast<double>(points.size());
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double u = points[i];
        d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
    }
    return d;
}

double erdos_turan_bound(const std::vector<std::complex<double>>& weyl_values)
{
    if (weyl_values.empty()) {
        throw DomainError("erdos_turan_bound: need K >= 1");
    }
    const double K = static_cast<double>(weyl_values.size());
    double s = 1.0 / (K + 1.0);
    for (std::size_t k = 1; k <= weyl_values.size(); ++k) {
        s += std::abs(weyl_values[k - 1]) / static_cast<double>(k);
    }
    return 3.0 * s;
}

DelSums del_partial_sums(const std::function<std::complex<double>(double)>& mu_hat, const OrbitSpec& spec,
                         std::int64_t p, std::size_t N_max)
{
    if (p == 0) {
        throw DomainError("del_partial_sums: p must be nonzero");
    }
    if (N_max < 1 || N_max > spec.length()) {
        throw RangeError("del_partial_sums: N_max must lie in 1.." + std::to_string(spec.length()));
    }
    std::vector<BigInt> s(N_max);
    for (std::size_t k = 1; k <= N_max; ++k) {
        s[k - 1] = spec.term(k);
    }
    // Distinct frequencies p (s_k - s_m), each evaluated once.
    std::map<double, std::complex<double>> cache;
    auto value = [&](double xi) {
        auto it = cache.find(xi);
        if (it == cache.end()) {
            it = cache.emplace(xi, mu_hat(xi)).first;
        }
        return it->second;
    };
    const double pd = static_cast<double>(p);
    DelSums out;
    out.terms.reserve(N_max);
    out.partial.reserve(N_max);
    // Inner sum S_N = sum_{k,m<=N}; S_N = S_{N-1} + mu^(0) + sum_{m<N} [mu^(p(s_N-s_m)) + mu^(p(s_m-s_N))].
    std::complex<double> inner{0.0, 0.0};
    double running = 0.0;
    for (std::size_t N = 1; N <= N_max; ++N) {
        std::complex<double> add = value(0.0);
        for (std::size_t m = 1; m < N; ++m) {
            const double diff = pd * to_double(Rational(s[N - 1] - s[m - 1]));
            add += value(diff) + value(-diff);
        }
        inner += add;
        const double n3 = static_cast<double>(N) * static_cast<double>(N) * static_cast<double>(N);
        if (std::abs(inner.imag()) / n3 >= 1e-9) {
            throw PrecisionError("del_partial_sums: imaginary part does not cancel; mu_hat is not Hermitian");
        }
        const double term = inner.real() / n3;
        running += term;
        out.terms.push_back(term);
        out.partial.push_back(running);
    }
    out.evaluations = cache.size();
    return out;
}

Rational sample_point(const MeasureModel& model, std::uint64_t seed, std::uint64_t index, double bits)
{
    CounterRng rng(seed, index);
    // |I_w| <= q^-2, so q^2 > 2^bits pins the point to 2^-bits.
    const Word w = sample_word(model, rng, 0.5 * bits * std::log(2.0) + 1.0);
    return cylinder_midpoint(w);
}

NormalitySummary normality_experiment(const MeasureModel& model, std::uint64_t base, std::size_t n_samples,
                                      std::size_t N, std::uint64_t seed)
{
    if (base < 2) {
        throw DomainError("normality_experiment: base must be >= 2");
    }
    if (n_samples < 1 || N < 1) {
        throw DomainError("normality_experiment: need at least one sample and one orbit point");
    }
    const OrbitSpec spec = OrbitSpec::power_base(base, N);
    const double bits = (static_cast<double>(N) + 64.0) * std::log2(static_cast<double>(base)) + 64.0;
    NormalitySummary out;
    out.discrepancies.resize(n_samples);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_samples); ++i) {
        const Rational x = sample_point(model, seed, static_cast<std::uint64_t>(i), bits);
        out.discrepancies[static_cast<std::size_t>(i)] = star_discrepancy(orbit_points(x, spec, N));
    }
    std::vector<double> sorted = out.discrepancies;
    std::sort(sorted.begin(), sorted.end());
    out.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    out.median = sorted[sorted.size() / 2];
    out.q90 = sorted[std::min(sorted.size() - 1, static_cast<std::size_t>(0.9 * static_cast<double>(sorted.size())))];
    out.max = sorted.back();
    return out;
}

} // namespace gaussline
