#include "gaussline/errors.hpp"
#include "gaussline/measure.hpp"
#include "gaussline/potential.hpp"
#include "gaussline/thermo.hpp"

#include "oracles.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace gaussline;

namespace {

const double kTheta = std::numbers::phi;

// int g dmu for the Minkowski measure from the Stern-Brocot tree: the 2^L
// Farey intervals of level L each carry ?-mass exactly 2^-L.  The midpoint
// rule error shrinks by 4 every two levels, so levels L and L - 2 are
// combined by Richardson extrapolation.
template <class G>
double minkowski_integral(const G& g, int L = 24)
{
    auto level = [&](int depth) {
        struct Node {
            std::uint64_t a, b, c, d;
            int level;
        };
        std::vector<Node> stack{{0, 1, 1, 1, 0}};
        const double m = std::ldexp(1.0, -depth);
        double s = 0.0;
        while (!stack.empty()) {
            const Node n = stack.back();
            stack.pop_back();
            if (n.level == depth) {
                s += m * g(0.5 * (static_cast<double>(n.a) / n.b + static_cast<double>(n.c) / n.d));
                continue;
            }
            const std::uint64_t e = n.a + n.c;
            const std::uint64_t f = n.b + n.d;
            stack.push_back({n.a, n.b, e, f, n.level + 1});
            stack.push_back({e, f, n.c, n.d, n.level + 1});
        }
        return s;
    };
    const double fine = level(L);
    const double coarse = level(L - 2);
    return fine + (fine - coarse) / 3.0;
}

// E[2 log q_n] over a Bernoulli law on a finite alphabet, by enumeration.
double mean_log_continuant(const std::vector<Digit>& digits, const std::vector<double>& p, int n)
{
    double total = 0.0;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        double mass = 1.0;
        double qpd = 0.0, qd = 1.0;
        for (std::size_t i : idx) {
            mass *= p[i];
            const double nq = static_cast<double>(digits[i]) * qd + qpd;
            qpd = qd;
            qd = nq;
        }
        total += mass * 2.0 * std::log(qd);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == digits.size()) {
            idx[k++] = 0;
        }
        if (k == idx.size()) {
            break;
        }
    }
    return total;
}

} // namespace

TEST(Birkhoff, Examples)
{
    const Potential fair = Potential::bernoulli(DigitLaw({0.5, 0.5}));
    EXPECT_NEAR(birkhoff_sum(fair, Word{1, 2}, 0.3), std::log(0.25), 1e-15);
    EXPECT_NEAR(birkhoff_sum(Potential::tlog(1), Word{1}, 1 / kTheta), -2 * std::log(kTheta), 1e-15);
    EXPECT_NEAR(birkhoff_sum(Potential::tlog(1), Word{2, 3}, 0.0), std::log(1.0 / 49.0), 1e-14);
}

TEST(Birkhoff, MatchesPointwiseOrbitSum)
{
    // S_n phi(T_w x) = sum_k phi(T^k T_w x), with the orbit taken exactly
    std::mt19937_64 rng(1);
    const Potential phi(Combo{{{0.7, Potential::bernoulli(DigitLaw::geometric(0.4))}, {1.0, Potential::tlog(0.8)}}});
    for (int t = 0; t < 100; ++t) {
        std::vector<Digit> d(1 + rng() % 6);
        for (auto& a : d) {
            a = 1 + rng() % 9;
        }
        const Word w(d);
        const double x = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
        Rational y = oracle::fold(w, exact_rational(x));
        double s = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            s += phi(to_double(y));
            const ExactGaussStep st = gauss_step(y);
            y = st.remainder;
        }
        EXPECT_NEAR(birkhoff_sum(phi, w, x), s, 1e-12 * (1 + std::abs(s))) << to_string(w);
    }
}

TEST(Birkhoff, CocycleIdentity)
{
    std::mt19937_64 rng(2);
    const Potential phi(Combo{{{1.0, Potential::bernoulli(DigitLaw::minkowski())}, {1.0, Potential::tlog(1.3)}}});
    for (int t = 0; t < 200; ++t) {
        auto random_word = [&] {
            std::vector<Digit> d(1 + rng() % 6);
            for (auto& a : d) {
                a = 1 + rng() % 20;
            }
            return Word(d);
        };
        const Word u = random_word();
        const Word v = random_word();
        const double x = static_cast<double>(rng() % 1001) / 1000.0;
        const double lhs = birkhoff_sum(phi, u + v, x);
        const double rhs = birkhoff_sum(phi, u, inverse_branch(v, x)) + birkhoff_sum(phi, v, x);
        EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(lhs)));
    }
}

TEST(PeriodicPoint, Examples)
{
    EXPECT_NEAR(periodic_point(Word{1}), (std::sqrt(5.0) - 1) / 2, 1e-15);
    EXPECT_NEAR(periodic_point(Word{2}), std::sqrt(2.0) - 1, 1e-15);
    EXPECT_NEAR(periodic_point(Word{1, 1}), periodic_point(Word{1}), 1e-15);
    // [0; 1, 2, 1, 2, ...] solves x^2 + 2x - 2 = 0
    EXPECT_NEAR(periodic_point(Word{1, 2}), std::sqrt(3.0) - 1, 1e-15);
    oracle::for_each_word({1, 2, 5}, 4, [](const Word& w) {
        const double x = periodic_point(w);
        EXPECT_NEAR(inverse_branch(w, x), x, 2e-15);
        const Branch b = branch_of(w);
        EXPECT_GE(x, b.low());
        EXPECT_LE(x, b.high());
    });
}

TEST(Pressure, TrivialSums)
{
    const Alphabet two = Alphabet::finite({1, 2});
    EXPECT_NEAR(pressure_estimate(Potential::zero(), two, 8).value, std::log(2.0), 1e-14);
    EXPECT_NEAR(pressure_estimate(Potential::bernoulli(DigitLaw({0.5, 0.5})), two, 8).value, 0.0, 1e-14);
    EXPECT_LT(pressure_estimate(Potential::tlog(1), two, 12).value, 0.0);
    const PressureEstimate e = pressure_estimate(Potential::zero(), Alphabet::first_n(3), 10);
    ASSERT_EQ(e.sequence.size(), 6u);
    EXPECT_EQ(e.sequence.front().first, 5);
    for (const auto& [m, v] : e.sequence) {
        EXPECT_NEAR(v, std::log(3.0), 1e-14) << m;
    }
}

TEST(Pressure, GoldenWord)
{
    // the single periodic orbit of the all-ones alphabet: S_k psi = -2k log theta
    EXPECT_NEAR(pressure_estimate(Potential::tlog(1), Alphabet::finite({1}), 9).value, -2 * std::log(kTheta), 1e-12);
    for (int k = 1; k <= 8; ++k) {
        const Word w(std::vector<Digit>(static_cast<std::size_t>(k), 1));
        EXPECT_NEAR(birkhoff_sum(Potential::tlog(1), w, periodic_point(w)), -2.0 * k * std::log(kTheta), 1e-12);
    }
}

TEST(Pressure, BernoulliConsistencyEnvelope)
{
    const DigitLaw law({0.2, 0.3, 0.5});
    for (int n = 4; n <= 14; ++n) {
        const double v = pressure_estimate(Potential::bernoulli(law), Alphabet::first_n(3), n).value;
        EXPECT_LE(std::abs(v), 5.0 / n) << n;
    }
}

TEST(Pressure, DecreasingInS)
{
    const Alphabet a = Alphabet::first_n(3);
    double prev = std::numeric_limits<double>::infinity();
    for (double s = 0.0; s <= 2.0; s += 0.125) {
        const double v = pressure_estimate(Potential::tlog(s), a, 8).value;
        EXPECT_LT(v, prev) << s;
        prev = v;
    }
}

TEST(Pressure, BudgetIsEnforced)
{
    Limits small;
    small.budget = 1000;
    EXPECT_THROW(pressure_estimate(Potential::zero(), Alphabet::first_n(5), 6, small), ResourceError);
    EXPECT_NO_THROW(pressure_estimate(Potential::zero(), Alphabet::first_n(5), 4, small));
}

TEST(Pressure, TailSeries)
{
    // tlog(1): sum_{m > M} x_m^2 with x_m the fixed point of 1/(m+x), about 1/M
    const double tail = pressure_tail(linearize(Potential::tlog(1)), 1000);
    double s = 0.0;
    for (int m = 1001; m < 20000000; ++m) {
        const double md = m;
        const double x = 0.5 * (std::sqrt(md * md + 4) - md);
        s += x * x;
    }
    s += 1.0 / 20000000;
    // geometric extrapolation of the doubling increments is good to ~1e-4 here
    EXPECT_NEAR(tail, s, 1e-4 * s);
    EXPECT_THROW(pressure_tail(linearize(Potential::tlog(0.5)), 100), PrecisionError);
    EXPECT_THROW(pressure_estimate(Potential::tlog(0.4), Alphabet::truncated(10, 0.1), 2), PrecisionError);
}

TEST(PressureRoot, DimensionOfB2)
{
    // literature value 0.5312805062772051416...
    const double s = pressure_root(Alphabet::finite({1, 2}), 0.3, 0.9, 16, 1e-7);
    EXPECT_NEAR(s, 0.53128050627720514, 1e-6);
}

TEST(PressureRoot, JarnikSandwich)
{
    double prev = 0.0;
    for (Digit n = 2; n <= 5; ++n) {
        const double s = pressure_root(Alphabet::first_n(n), 0.1, 1.0, 8, 1e-6);
        EXPECT_GT(s, prev) << n;
        EXPECT_LT(s, 1.0) << n;
        prev = s;
    }
}

TEST(PressureRoot, Brackets)
{
    EXPECT_THROW(pressure_root(Alphabet::finite({1, 2}), 0.6, 0.9, 8, 1e-4), BracketError);
    EXPECT_THROW(pressure_root(Alphabet::finite({1}), 0.01, 1.0, 8, 1e-4), BracketError);
    EXPECT_THROW(pressure_root(Alphabet::finite({1, 2}), 0.9, 0.3, 8, 1e-4), BracketError);
}

TEST(Entropy, Examples)
{
    EXPECT_NEAR(entropy_estimate(MeasureModel::bernoulli({0.5, 0.5}), 6).value, std::log(2.0), 1e-15);
    const MeasureModel mink40 = MeasureModel::bernoulli(DigitLaw::minkowski(), 40);
    EXPECT_NEAR(entropy_estimate(mink40, 8).value, 2 * std::log(2.0), 1e-6);
    EXPECT_EQ(entropy_estimate(MeasureModel::bernoulli({1.0, 0.0}), 5).value, 0.0);
    StatsOptions strict;
    strict.max_truncated = 1e-9;
    EXPECT_THROW(entropy_estimate(MeasureModel::bernoulli(DigitLaw::minkowski(), 10), 8, strict), PrecisionError);
}

TEST(Entropy, EnumerationOracle)
{
    const std::vector<double> p{0.2, 0.3, 0.5};
    const MeasureModel m = MeasureModel::bernoulli(p);
    double h = 0.0;
    oracle::for_each_word({1, 2, 3}, 6, [&](const Word& w) {
        if (w.size() == 6) {
            const double mu = cylinder_mass(m, w);
            h -= mu * std::log(mu);
        }
    });
    EXPECT_NEAR(entropy_estimate(m, 6).value, h / 6, 1e-13);
}

TEST(Lyapunov, GoldenPointMass)
{
    const Estimate e = lyapunov_estimate(MeasureModel::bernoulli({1.0, 0.0}), 10);
    EXPECT_NEAR(e.value, 2 * std::log(kTheta), 1e-9 + e.error);
}

TEST(Lyapunov, GaussClosedFormAgainstQuadrature)
{
    boost::math::quadrature::tanh_sinh<double> ts;
    const double oracle =
        2.0 * ts.integrate([](double x) { return -std::log(x) / (std::log(2.0) * (1 + x)); }, 0.0, 1.0);
    EXPECT_NEAR(lyapunov_estimate(MeasureModel::gauss(), 10).value, oracle, 1e-12);
    EXPECT_NEAR(entropy_estimate(MeasureModel::gauss(), 10).value, oracle, 1e-12);
}

TEST(Lyapunov, BernoulliMatchesContinuantGrowth)
{
    const std::vector<Digit> digits{1, 2, 3};
    const std::vector<double> p{0.2, 0.3, 0.5};
    const double oracle = mean_log_continuant(digits, p, 13) - mean_log_continuant(digits, p, 12);
    const Estimate e = lyapunov_estimate(MeasureModel::bernoulli(p), 12);
    EXPECT_NEAR(e.value, oracle, 1e-6 + e.error);
}

TEST(Lyapunov, MinkowskiAgainstQuestionMarkIntegral)
{
    const double oracle = minkowski_integral([](double x) { return -2 * std::log(x); });
    const Estimate e = lyapunov_estimate(MeasureModel::minkowski(), 12);
    EXPECT_NEAR(e.value, oracle, 1e-6 + e.error);
    EXPECT_GE(e.value, 2 * std::log(kTheta));
}

TEST(Kinney, MinkowskiDimension)
{
    const Estimate k10 = kinney_dimension(MeasureModel::minkowski(), 10);
    const Estimate k12 = kinney_dimension(MeasureModel::minkowski(), 12);
    EXPECT_GT(k10.value, 0.5);
    EXPECT_LT(k10.value, 1.0);
    EXPECT_NEAR(k10.value, k12.value, 1e-3);
    const double integral = minkowski_integral([](double x) { return std::log1p(x); });
    EXPECT_NEAR(k12.value, std::log(2.0) / (2 * integral), 1e-6 + k12.error);
    const MeasureStats st = measure_stats(MeasureModel::minkowski(), 10);
    EXPECT_NEAR(st.dimension_s, k10.value, 1e-2);
    EXPECT_THROW(kinney_dimension(MeasureModel::lebesgue(), 10), DomainError);
}

TEST(MeasureStats, StockModelsHaveDimensionInUnitInterval)
{
    const std::vector<MeasureModel> models{
        MeasureModel::minkowski(), MeasureModel::lebesgue(), MeasureModel::gauss(),
        MeasureModel::bernoulli({0.5, 0.5}), MeasureModel::bernoulli(DigitLaw::geometric(0.3), 60),
        MeasureModel::finite_potential(Potential::tlog(0.6), Alphabet::first_n(3))};
    for (const MeasureModel& m : models) {
        const MeasureStats s = measure_stats(m, 10);
        EXPECT_GT(s.dimension_s, 0.0) << m.name();
        EXPECT_LE(s.dimension_s, 1.0 + 1e-12) << m.name();
        EXPECT_GE(s.lyapunov_lambda, 2 * std::log(kTheta) - 1e-9) << m.name();
        EXPECT_DOUBLE_EQ(s.dimension_s, s.entropy_h / s.lyapunov_lambda);
    }
}

TEST(MeasureStats, EquilibriumStateOfB2)
{
    // at the pressure zero, h = s lambda for the Gibbs state of -s log|T'|
    const double s = pressure_root(Alphabet::finite({1, 2}), 0.3, 0.9, 14, 1e-8);
    const MeasureModel m = MeasureModel::finite_potential(Potential::tlog(s), Alphabet::finite({1, 2}));
    const MeasureStats st = measure_stats(m, 14);
    EXPECT_NEAR(st.dimension_s, s, 1e-2);
}

TEST(Transfer, Normalisation)
{
    const Potential fair = Potential::bernoulli(DigitLaw({0.5, 0.5}));
    const auto one = [](double) { return std::complex<double>(1.0, 0.0); };
    for (int depth : {1, 4, 9}) {
        EXPECT_NEAR(transfer_apply(fair, Alphabet::finite({1, 2}), one, 0.37, depth).value.real(), 1.0, 1e-13);
    }
    const TransferResult r =
        transfer_apply(Potential::bernoulli(DigitLaw::minkowski()), Alphabet::truncated(30, 1e-6), one, 0.2, 1);
    EXPECT_NEAR(r.value.real(), 1.0 - std::ldexp(1.0, -30), 1e-12);
    EXPECT_GE(r.error, std::ldexp(1.0, -30));
    const auto id = [](double y) { return std::complex<double>(y, 0.0); };
    EXPECT_NEAR(transfer_apply(fair, Alphabet::finite({1, 2}), id, 0.0, 1).value.real(), 0.75, 1e-15);

    std::mt19937_64 rng(4);
    const Potential geo = Potential::bernoulli(DigitLaw::geometric(0.5));
    for (int t = 0; t < 100; ++t) {
        const double x = static_cast<double>(rng() % 100001) / 100000.0;
        const TransferResult g = transfer_apply(geo, Alphabet::truncated(20, 1e-3), one, x, 2);
        EXPECT_LE(std::abs(g.value.real() - 1.0), g.error);
    }
}

TEST(Transfer, GaussDensityIsFixed)
{
    // L h = h for h = 1/(1+x) and phi = -log|T'|; the truncated sum misses
    // exactly 1/(A + 1 + x) at depth 1
    const auto h = [](double y) { return std::complex<double>(1.0 / (1.0 + y), 0.0); };
    const Digit A = 200;
    for (double x : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        const TransferResult r = transfer_apply(Potential::tlog(1), Alphabet::truncated(A, 1.0), h, x, 1);
        const double missing = 1.0 / (static_cast<double>(A) + 1 + x);
        EXPECT_NEAR(r.value.real(), 1.0 / (1 + x) - missing, 1e-13);
        EXPECT_GE(r.error + 1e-13, missing);
    }
    // depth 2 with a finite alphabet: compare with an explicit double sum
    const Alphabet a = Alphabet::first_n(4);
    const double x = 0.3;
    double direct = 0.0;
    for (Digit i = 1; i <= 4; ++i) {
        for (Digit j = 1; j <= 4; ++j) {
            const Word w{i, j};
            direct += std::abs(inverse_branch_derivative(w, x)) * (1.0 / (1.0 + inverse_branch(w, x)));
        }
    }
    EXPECT_NEAR(transfer_apply(Potential::tlog(1), a, h, x, 2).value.real(), direct, 1e-14);
}
