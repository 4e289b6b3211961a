#include "gaussline/equidist.hpp"
#include "gaussline/errors.hpp"
#include "gaussline/measure.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace gaussline;

namespace {

namespace mp = boost::multiprecision;

constexpr double kTwoPi = 2 * std::numbers::pi;

// frac(s x) straight from the rational.
double exact_frac(const Rational& x, const BigInt& s)
{
    const Rational y = x * Rational(s);
    BigInt r = mp::numerator(y) % mp::denominator(y);
    if (r < 0) {
        r += mp::denominator(y);
    }
    return to_double(Rational(r, mp::denominator(y)));
}

BigInt pow_big(std::uint64_t b, std::size_t k)
{
    BigInt r = 1;
    for (std::size_t i = 0; i < k; ++i) {
        r *= b;
    }
    return r;
}

// sup_t |#{u < t}/N - t| by checking both sides of every sample point.
double brute_star_discrepancy(const std::vector<double>& pts)
{
    const double n = static_cast<double>(pts.size());
    double d = 0.0;
    for (double t : pts) {
        const double below = static_cast<double>(std::count_if(pts.begin(), pts.end(), [&](double u) { return u < t; }));
        const double at_or_below =
            static_cast<double>(std::count_if(pts.begin(), pts.end(), [&](double u) { return u <= t; }));
        d = std::max({d, std::abs(below / n - t), std::abs(at_or_below / n - t)});
    }
    // the interval [0, 1) holds every point
    return std::max(d, 0.0);
}

Rational random_rational(std::mt19937_64& rng)
{
    const long long den = 1000 + static_cast<long long>(rng() % 1000000007ULL);
    const long long num = static_cast<long long>(rng() % static_cast<unsigned long long>(den));
    return Rational(num, den);
}

// Kolmogorov distance between the empirical law of u and the uniform law.
double ks_uniform(std::vector<double> u)
{
    return star_discrepancy(std::move(u));
}

} // namespace

TEST(Orbit, SpecValidation)
{
    EXPECT_THROW(OrbitSpec::power_base(1, 10), DomainError);
    EXPECT_THROW(OrbitSpec::explicit_sequence({3, 3}), DomainError);
    EXPECT_THROW(OrbitSpec::explicit_sequence({0, 3}), DomainError);
    const OrbitSpec s = OrbitSpec::power_base(3, 5);
    EXPECT_EQ(s.term(5), BigInt(243));
    EXPECT_THROW(s.term(6), RangeError);
    EXPECT_THROW(orbit_points(Rational(1, 3), s, 6), RangeError);
}

TEST(Orbit, MatchesExactRationalArithmetic)
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 40; ++t) {
        const Rational x = random_rational(rng) + Rational(static_cast<long long>(t % 3) - 1);
        const std::uint64_t base = 2 + t % 9;
        const std::size_t N = 80;
        const std::vector<double> pts = orbit_points(x, OrbitSpec::power_base(base, N), N);
        ASSERT_EQ(pts.size(), N);
        for (std::size_t k = 1; k <= N; ++k) {
            EXPECT_NEAR(pts[k - 1], exact_frac(x, pow_big(base, k)), 4e-16) << t << " " << k;
        }
        const std::vector<std::uint64_t> seq{1, 5, 17, 1000003, 4000000000ULL, 9000000000000000000ULL};
        const std::vector<double> ex = orbit_points(x, OrbitSpec::explicit_sequence(seq), seq.size());
        for (std::size_t k = 0; k < seq.size(); ++k) {
            EXPECT_NEAR(ex[k], exact_frac(x, BigInt(seq[k])), 4e-16) << t << " " << seq[k];
        }
    }
}

TEST(Weyl, Examples)
{
    const OrbitSpec b2 = OrbitSpec::power_base(2, 1000);
    EXPECT_EQ(weyl_sum(Rational(0), b2, 1, 1000), std::complex<double>(1.0, 0.0));
    EXPECT_EQ(weyl_sum(0.0, b2, 3, 1000), std::complex<double>(1.0, 0.0));
    for (std::size_t N : {10u, 101u, 1000u}) {
        EXPECT_GE(std::abs(weyl_sum(Rational(1, 3), b2, 1, N)), 0.5 - 1.0 / static_cast<double>(N));
    }
    EXPECT_THROW(weyl_sum(Rational(1, 3), b2, 0, 10), DomainError);
    EXPECT_THROW(weyl_sum(std::nan(""), b2, 1, 10), DomainError);
}

TEST(Weyl, MatchesDirectSumAndSymmetry)
{
    std::mt19937_64 rng(9);
    for (int t = 0; t < 30; ++t) {
        const Rational x = random_rational(rng);
        const std::uint64_t base = 2 + t % 5;
        const std::int64_t p = 1 + t % 4;
        const std::size_t N = 200;
        std::complex<double> direct{0.0, 0.0};
        for (std::size_t k = 1; k <= N; ++k) {
            const double u = exact_frac(x * Rational(p), pow_big(base, k));
            direct += std::polar(1.0, kTwoPi * u);
        }
        direct /= static_cast<double>(N);
        const OrbitSpec spec = OrbitSpec::power_base(base, N);
        const std::complex<double> w = weyl_sum(x, spec, p, N);
        EXPECT_LE(std::abs(w - direct), 1e-12) << t;
        EXPECT_LE(std::abs(w), 1.0 + 1e-15);
        EXPECT_LE(std::abs(weyl_sum(x, spec, -p, N) - std::conj(w)), 1e-12);
        EXPECT_LE(std::abs(weyl_sum(x + Rational(1), spec, p, N) - w), 1e-12);
    }
}

TEST(Weyl, DoubleInputHasOnlyFiftyThreeBits)
{
    // 0.1 as a double is m 2^-55 with m odd, so its base-2 orbit hits 0 at k = 55
    EXPECT_EQ(Rational(0.1), Rational(3602879701896397LL, 36028797018963968LL));
    const std::vector<double> pts = orbit_points(Rational(0.1), OrbitSpec::power_base(2, 80), 80);
    EXPECT_EQ(pts[53], 0.5);
    for (std::size_t k = 55; k <= 80; ++k) {
        EXPECT_EQ(pts[k - 1], 0.0) << k;
    }
    const OrbitSpec spec = OrbitSpec::power_base(2, 80);
    EXPECT_LE(std::abs(weyl_sum(0.1, spec, 1, 80) - weyl_sum(Rational(0.1), spec, 1, 80)), 1e-15);
}

TEST(Weyl, LebesgueSamplesAreSmall)
{
    const std::size_t N = std::size_t{1} << 15;
    const OrbitSpec spec = OrbitSpec::power_base(2, N);
    const double bits = static_cast<double>(N) + 128.0;
    int small = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Rational x = sample_point(MeasureModel::lebesgue(), seed, 0, bits);
        small += std::abs(weyl_sum(x, spec, 1, N)) <= 0.05;
    }
    EXPECT_GE(small, 45);
}

TEST(StarDiscrepancy, Examples)
{
    for (std::size_t N : {1u, 10u, 1000u}) {
        std::vector<double> pts;
        for (std::size_t k = 0; k < N; ++k) {
            pts.push_back(static_cast<double>(k) / static_cast<double>(N));
        }
        // the points k/N are themselves rounded
        EXPECT_NEAR(star_discrepancy(pts), 1.0 / static_cast<double>(N), 1e-15) << N;
    }
    EXPECT_DOUBLE_EQ(star_discrepancy(std::vector<double>(7, 0.5)), 0.5);
    EXPECT_DOUBLE_EQ(star_discrepancy({0.0}), 1.0);
    EXPECT_THROW(star_discrepancy({}), DomainError);
    // reduction mod 1
    EXPECT_DOUBLE_EQ(star_discrepancy({1.25, -0.25, 0.25}), star_discrepancy({0.25, 0.75, 0.25}));
}

TEST(StarDiscrepancy, MatchesBruteForce)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> pts(1 + rng() % 300);
        for (double& p : pts) {
            // coarse grid values force ties
            p = t % 2 ? u(rng) : std::floor(u(rng) * 16) / 16;
        }
        EXPECT_NEAR(star_discrepancy(pts), brute_star_discrepancy(pts), 1e-15) << t;
        EXPECT_GE(star_discrepancy(pts), 0.0);
        EXPECT_LE(star_discrepancy(pts), 1.0);
    }
}

TEST(ErdosTuran, ExamplesAndInequality)
{
    EXPECT_DOUBLE_EQ(erdos_turan_bound(std::vector<std::complex<double>>(99, {0.0, 0.0})), 0.03);
    EXPECT_DOUBLE_EQ(erdos_turan_bound({{1.0, 0.0}}), 4.5);
    EXPECT_THROW(erdos_turan_bound({}), DomainError);

    const auto bound_for = [](const std::vector<double>& pts, int K) {
        std::vector<std::complex<double>> w;
        for (int k = 1; k <= K; ++k) {
            w.push_back(weyl_sum(pts, k));
        }
        return erdos_turan_bound(w);
    };
    std::vector<double> grid;
    for (int k = 0; k < 1000; ++k) {
        grid.push_back(k / 1000.0);
    }
    EXPECT_GE(bound_for(grid, 100), star_discrepancy(grid));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> pts(1000);
        for (double& p : pts) {
            // half the sets are skewed so the discrepancy is not tiny
            p = t % 2 ? u(rng) : u(rng) * u(rng);
        }
        EXPECT_GE(bound_for(pts, 100), star_discrepancy(pts)) << t;
    }
}

TEST(Del, DiracAndLebesgue)
{
    const OrbitSpec spec = OrbitSpec::power_base(2, 40);
    const DelSums dirac = del_partial_sums([](double) { return std::complex<double>(1.0, 0.0); }, spec, 1, 40);
    double harmonic = 0.0;
    for (std::size_t N = 1; N <= 40; ++N) {
        harmonic += 1.0 / static_cast<double>(N);
        EXPECT_NEAR(dirac.partial[N - 1], harmonic, 1e-12);
    }
    const DelSums leb = del_partial_sums(
        [](double xi) { return xi == 0.0 ? std::complex<double>(1.0, 0.0) : std::complex<double>(0.0, 0.0); }, spec,
        3, 40);
    double basel = 0.0;
    for (std::size_t N = 1; N <= 40; ++N) {
        const double n = static_cast<double>(N);
        EXPECT_EQ(leb.terms[N - 1], n / (n * n * n));
        basel += 1.0 / (n * n);
        EXPECT_NEAR(leb.partial[N - 1], basel, 1e-13);
    }
    EXPECT_NEAR(std::numbers::pi * std::numbers::pi / 6 - leb.partial.back(), 1.0 / 40.5, 1e-4);
}

TEST(Del, CachesDistinctFrequencies)
{
    std::set<double> asked;
    const auto mu = [&](double xi) {
        asked.insert(xi);
        return std::complex<double>(std::exp(-std::abs(xi)), 0.0);
    };
    const std::vector<std::uint64_t> seq{1, 2, 3, 5, 8, 13, 21};
    const DelSums d = del_partial_sums(mu, OrbitSpec::explicit_sequence(seq), 2, seq.size());
    std::set<double> expected;
    for (auto a : seq) {
        for (auto b : seq) {
            expected.insert(2.0 * (static_cast<double>(a) - static_cast<double>(b)));
        }
    }
    EXPECT_EQ(asked, expected);
    EXPECT_EQ(d.evaluations, expected.size());
    // brute double sum
    double running = 0.0;
    for (std::size_t N = 1; N <= seq.size(); ++N) {
        double inner = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            for (std::size_t m = 0; m < N; ++m) {
                inner += std::exp(-2.0 * std::abs(static_cast<double>(seq[k]) - static_cast<double>(seq[m])));
            }
        }
        running += inner / std::pow(static_cast<double>(N), 3);
        EXPECT_NEAR(d.partial[N - 1], running, 1e-14);
    }
}

TEST(Del, Errors)
{
    const OrbitSpec spec = OrbitSpec::power_base(2, 10);
    const auto one = [](double) { return std::complex<double>(1.0, 0.0); };
    EXPECT_THROW(del_partial_sums(one, spec, 0, 5), DomainError);
    EXPECT_THROW(del_partial_sums(one, spec, 1, 11), RangeError);
    EXPECT_THROW(del_partial_sums([](double) { return std::complex<double>(0.0, 1.0); }, spec, 1, 5),
                 PrecisionError);
    // i xi is Hermitian, so its imaginary parts cancel
    EXPECT_NO_THROW(del_partial_sums([](double xi) { return std::complex<double>(0.0, xi); }, spec, 1, 5));
}

TEST(Sampling, PointsFollowTheModel)
{
    const std::size_t n = 4000;
    std::vector<double> mink;
    std::vector<double> gauss;
    for (std::uint64_t i = 0; i < n; ++i) {
        mink.push_back(question_mark_approx(to_double(sample_point(MeasureModel::minkowski(), 5, i, 80))));
        gauss.push_back(std::log2(1.0 + to_double(sample_point(MeasureModel::gauss(), 5, i, 80))));
    }
    // 1.63 / sqrt(n) is the 1% Kolmogorov quantile
    EXPECT_LT(ks_uniform(mink), 1.63 / std::sqrt(static_cast<double>(n)));
    EXPECT_LT(ks_uniform(gauss), 1.63 / std::sqrt(static_cast<double>(n)));
    EXPECT_EQ(sample_point(MeasureModel::minkowski(), 5, 17, 80), sample_point(MeasureModel::minkowski(), 5, 17, 80));
    EXPECT_NE(sample_point(MeasureModel::minkowski(), 5, 17, 80), sample_point(MeasureModel::minkowski(), 6, 17, 80));
}

TEST(Sampling, PrecisionMeetsRequest)
{
    for (std::uint64_t i = 0; i < 50; ++i) {
        const Rational x = sample_point(MeasureModel::gauss(), 3, i, 200);
        // a midpoint of a cylinder of length below 2^-200 has a denominator above 2^100
        EXPECT_GT(mp::denominator(x), pow_big(2, 100)) << i;
    }
}

TEST(Normality, LebesgueAndReportedSummary)
{
    const NormalitySummary s = normality_experiment(MeasureModel::lebesgue(), 2, 20, 4096, 7);
    ASSERT_EQ(s.discrepancies.size(), 20u);
    std::vector<double> sorted = s.discrepancies;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(s.max, sorted.back());
    EXPECT_EQ(s.median, sorted[10]);
    EXPECT_EQ(s.q90, sorted[18]);
    EXPECT_LE(s.mean, 0.05);
    // each entry is the discrepancy of the orbit of the corresponding sample
    const double bits = (4096.0 + 64.0) + 64.0;
    const Rational x3 = sample_point(MeasureModel::lebesgue(), 7, 3, bits);
    EXPECT_EQ(s.discrepancies[3],
              star_discrepancy(orbit_points(x3, OrbitSpec::power_base(2, 4096), 4096)));
    EXPECT_THROW(normality_experiment(MeasureModel::lebesgue(), 1, 5, 10, 1), DomainError);
}

TEST(Normality, RationalOrbitDoesNotEquidistribute)
{
    // 1/3 in base 2 alternates between 1/3 and 2/3
    const std::vector<double> pts = orbit_points(Rational(1, 3), OrbitSpec::power_base(2, 1000), 1000);
    EXPECT_NEAR(star_discrepancy(pts), 1.0 / 3, 1e-12);
}
