// Acceptance runner: `acceptance N` checks criterion N, `acceptance` checks
// all of them.  Each criterion prints one PASS/FAIL line.

#include "gaussline/contfrac.hpp"
#include "gaussline/deviation.hpp"
#include "gaussline/equidist.hpp"
#include "gaussline/fourier.hpp"
#include "gaussline/measure.hpp"
#include "gaussline/thermo.hpp"

#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gaussline;

namespace {

using Json = nlohmann::json;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Detail {
public:
    template <typename T>
    Detail& operator<<(const T& v)
    {
        s_ << v;
        return *this;
    }
    std::string str() const { return s_.str(); }

private:
    std::ostringstream s_;
};

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run_cli(const std::string& args)
{
    const std::string cmd = std::string(GAUSSLINE_CLI_PATH) + " " + args;
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Limits big_budget()
{
    Limits l = Limits::from_environment();
    l.budget = std::max<std::uint64_t>(l.budget, std::uint64_t{1} << 28);
    return l;
}

Outcome dimension_b2()
{
    const auto t0 = std::chrono::steady_clock::now();
    const CliRun r = run_cli("--format json --threads 1 dimension --alphabet 1,2 --depth 16 --tol 1e-4");
    const double secs = seconds_since(t0);
    if (r.code != 0) {
        return {false, "cli exit code " + std::to_string(r.code)};
    }
    const double d = Json::parse(r.out)["result"]["dimension"].get<double>();
    Detail msg;
    msg << "dim B2 = " << d << " (target 0.531 +- 0.002), " << secs << " s single-threaded";
    return {std::abs(d - 0.531) <= 0.002 && secs < 60.0, msg.str()};
}

Outcome jarnik_monotonicity()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> dims;
    for (Digit N = 2; N <= 5; ++N) {
        dims.push_back(pressure_root(Alphabet::first_n(N), 0.0, 1.0, 12, 1e-6, big_budget()));
    }
    const double secs = seconds_since(t0);
    bool ok = secs < 120.0;
    Detail msg;
    msg << "dim B_N for N = 2..5:";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        msg << " " << dims[i];
        ok = ok && dims[i] < 1.0 && (i == 0 || dims[i] > dims[i - 1]);
    }
    msg << ", " << secs << " s";
    return {ok, msg.str()};
}

Outcome minkowski_tail_law()
{
    const MeasureModel m = MeasureModel::minkowski();
    int bad = 0;
    for (Digit n = 1; n <= 40; ++n) {
        bad += tail_mass(m, n) != std::ldexp(1.0, 1 - static_cast<int>(n));
    }
    return {bad == 0, std::to_string(bad) + " of 40 tail masses differ from 2^(1-n)"};
}

Outcome minkowski_dimension_crosscheck()
{
    const auto t0 = std::chrono::steady_clock::now();
    const MeasureModel m = MeasureModel::minkowski();
    const Estimate kinney = kinney_dimension(m, 12);
    const MeasureStats st = measure_stats(m, 12);
    const double ratio = st.entropy_h / st.lyapunov_lambda;
    const double secs = seconds_since(t0);
    Detail msg;
    msg << "Kinney " << kinney.value << ", h/lambda " << ratio << ", difference " << std::abs(kinney.value - ratio)
        << ", " << secs << " s";
    const bool ok = std::abs(kinney.value - ratio) <= 1e-2 && kinney.value >= 0.6 && ratio >= 0.6 && secs < 60.0;
    return {ok, msg.str()};
}

Outcome salem_decay_fit()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto csv = std::filesystem::temp_directory_path() / "gaussline_acceptance_scan.csv";
    const CliRun scan = run_cli("--out " + csv.string() +
                                " fourier-scan --model minkowski --freqs log:64:65536:16 --tol 1e-3");
    if (scan.code != 0) {
        return {false, "fourier-scan exit code " + std::to_string(scan.code)};
    }
    const CliRun fit = run_cli("fit --in " + csv.string());
    std::filesystem::remove(csv);
    if (fit.code != 0) {
        return {false, "fit exit code " + std::to_string(fit.code)};
    }
    const double secs = seconds_since(t0);
    const Json r = Json::parse(fit.out)["result"];
    const double eta = r["eta_hat"].get<double>();
    const double lo = r["ci95"][0].get<double>();
    const double hi = r["ci95"][1].get<double>();
    Detail msg;
    msg << "eta_hat " << eta << ", 95% CI [" << lo << ", " << hi << "], r^2 " << r["r_squared"].get<double>()
        << ", " << r["points_used"].get<int>() << " points, " << secs << " s";
    return {eta > 0.0 && lo > 0.0 && secs < 600.0, msg.str()};
}

std::complex<double> gauss_density_transform(double xi)
{
    using boost::math::quadrature::gauss_kronrod;
    const double two_pi = 2 * std::numbers::pi;
    const double re = gauss_kronrod<double, 61>::integrate(
        [&](double x) { return std::cos(two_pi * xi * x) / (std::log(2.0) * (1 + x)); }, 0.0, 1.0, 10, 1e-12);
    const double im = gauss_kronrod<double, 61>::integrate(
        [&](double x) { return -std::sin(two_pi * xi * x) / (std::log(2.0) * (1 + x)); }, 0.0, 1.0, 10, 1e-12);
    return {re, im};
}

Outcome fourier_oracle_agreement()
{
    const std::vector<MeasureModel> models{MeasureModel::minkowski(), MeasureModel::gauss(),
                                           MeasureModel::bernoulli({0.5, 0.5})};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> log_xi(0.0, std::log(1000.0));
    int mc_bad = 0;
    double worst_mc = 0.0;
    for (int t = 0; t < 20; ++t) {
        const MeasureModel& m = models[rng() % models.size()];
        const double xi = std::exp(log_xi(rng));
        const FourierPoint c = transform_cylinder(m, xi, 1e-3);
        const FourierPoint mc = transform_mc(m, xi, 1000000, 77 + static_cast<std::uint64_t>(t));
        const double ratio = std::abs(c.value - mc.value) / (c.error_bound + mc.error_bound);
        worst_mc = std::max(worst_mc, ratio);
        mc_bad += ratio > 1.0;
    }
    int gauss_bad = 0;
    double worst_gauss = 0.0;
    for (double xi : {1.0, 2.0, 5.0, 10.0}) {
        const FourierPoint c = transform_cylinder(MeasureModel::gauss(), xi, 1e-4);
        const double diff = std::abs(c.value - gauss_density_transform(xi));
        worst_gauss = std::max(worst_gauss, diff);
        gauss_bad += diff > 1e-6;
    }
    Detail msg;
    msg << mc_bad << " of 20 cylinder/montecarlo pairs outside the combined bound (worst ratio " << worst_mc
        << "), Gauss density quadrature worst difference " << worst_gauss;
    return {mc_bad == 0 && gauss_bad == 0, msg.str()};
}

Outcome stationary_phase_audit()
{
    std::mt19937_64 rng(7);
    const auto draw = [&] {
        std::vector<Digit> d(8);
        for (auto& a : d) {
            a = 1 + static_cast<Digit>(rng() % 3);
        }
        return Word(std::move(d));
    };
    std::vector<std::pair<Word, Word>> pairs;
    for (int t = 0; t < 1000; ++t) {
        Word a = draw();
        Word b = draw();
        pairs.emplace_back(std::move(a), std::move(b));
    }
    std::uint64_t applicable = 0;
    std::uint64_t violations = 0;
    for (double xi : {1e2, 1e4}) {
        for (const auto& [a, b] : pairs) {
            const StationaryPhaseReport r = stationary_phase_check(a, b, xi);
            applicable += r.bound_case1.has_value() + r.bound_case2.has_value();
            violations += (r.bound_case1 && !r.holds_case1) + (r.bound_case2 && !r.holds_case2);
        }
    }
    Detail msg;
    msg << violations << " violations in " << applicable << " applicable bound checks over 2000 pair/frequency trials";
    return {violations == 0 && applicable > 0, msg.str()};
}

Outcome regular_words()
{
    const MeasureModel model = MeasureModel::bernoulli({0.5, 0.5});
    const Potential phi = Potential::bernoulli(DigitLaw({0.5, 0.5}));
    const IrregularCurve c =
        irregular_mass_curve(phi, model, Alphabet::finite({1, 2}), 0.4, {6, 8, 10, 12, 14}, big_budget());
    bool audit = true;
    bool decreasing = true;
    Detail msg;
    msg << "complement masses";
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        audit = audit && c.points[i].audit_ok;
        decreasing = decreasing && (i == 0 || c.points[i].mass < c.points[i - 1].mass);
        msg << " " << c.points[i].mass;
    }
    msg << ", slope " << c.slope << ", audit " << (audit ? "clean" : "FAILED");
    return {audit && decreasing && c.slope < 0.0, msg.str()};
}

Outcome exhaustive_continuants()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t words = 0;
    std::uint64_t failures = 0;
    double ratio_lo = 1e300;
    double ratio_hi = 0.0;
    oracle::for_each_word({1, 2, 3, 4, 5}, 8, [&](const Word& w) {
        ++words;
        const std::size_t n = w.size();
        const ConvergentQuad c = continuants(w);
        bool ok = Rational(c.p, c.q) == oracle::fold(w);
        ok = ok && c.q == oracle::denominator_of(w);
        ok = ok && c.p_prev * c.q - c.p * c.q_prev == ((n % 2 == 0) ? 1 : -1);
        const ConvergentQuad m = continuants(mirror(w));
        ok = ok && m.q == c.q && m.p == c.q_prev;
        ok = ok && cylinder(w).length() == Rational(BigInt(1), c.q * (c.q + c.q_prev));
        ok = ok && c.q >= oracle::fibonacci(static_cast<unsigned>(n + 1));
        for (std::size_t j = 1; j < n; ++j) {
            const double r = quasi_independence_ratio(w, j);
            ratio_lo = std::min(ratio_lo, r);
            ratio_hi = std::max(ratio_hi, r);
            ok = ok && r >= 0.5 && r <= 4.0;
        }
        if (n >= 2) {
            // the middle split once more from exact denominators
            const std::size_t j = n / 2;
            const Rational exact(oracle::denominator_of(w), oracle::denominator_of(w.prefix(n - j)) *
                                                                oracle::denominator_of(w.suffix_from(n - j)));
            ok = ok && std::abs(to_double(exact) - quasi_independence_ratio(w, j)) <= 1e-12;
        }
        failures += !ok;
    });
    const double secs = seconds_since(t0);
    Detail msg;
    msg << failures << " failures over " << words << " words, quasi-independence ratios in [" << ratio_lo << ", "
        << ratio_hi << "], " << secs << " s";
    return {failures == 0 && words == 488280 && secs < 60.0, msg.str()};
}

Outcome equidistribution()
{
    const std::size_t n_max = 64;
    const DelSums del = del_partial_sums(
        [](double xi) { return xi == 0.0 ? std::complex<double>(1.0, 0.0) : std::complex<double>(0.0, 0.0); },
        OrbitSpec::power_base(2, n_max), 1, n_max);
    int del_bad = 0;
    for (std::size_t N = 1; N <= n_max; ++N) {
        const double n = static_cast<double>(N);
        del_bad += del.terms[N - 1] != 1.0 / (n * n);
    }
    const double basel_gap = std::numbers::pi * std::numbers::pi / 6 - del.partial.back();
    const NormalitySummary s = normality_experiment(MeasureModel::minkowski(), 2, 50, std::size_t{1} << 15, 1);
    Detail msg;
    msg << "DEL increments equal to N^-2 at " << (n_max - static_cast<std::size_t>(del_bad)) << " of " << n_max
        << " steps (gap to pi^2/6: " << basel_gap << "); Minkowski base-2 mean star discrepancy " << s.mean
        << " (median " << s.median << ", max " << s.max << "; threshold 0.05 is a calibration choice)";
    return {del_bad == 0 && s.mean <= 0.05, msg.str()};
}

// ?([0; a_1..a_n]) = 2 sum_k (-1)^(k+1) 2^-(a_1 + ... + a_k)
Rational question_mark_series(const Word& w)
{
    Rational v = 0;
    std::uint64_t run = 0;
    int sign = 1;
    for (Digit a : w) {
        run += a;
        v += Rational(BigInt(2 * sign), BigInt(1) << static_cast<unsigned>(run));
        sign = -sign;
    }
    return v;
}

Outcome question_mark_exactness()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t words = 0;
    std::uint64_t failures = 0;
    // canonical words end in a digit >= 2
    std::vector<Digit> w;
    std::function<void()> rec = [&] {
        if (!w.empty() && w.back() >= 2) {
            const Word word(w);
            ++words;
            failures += box_inverse(question_mark(word), 64) != word;
        }
        if (w.size() == 10) {
            return;
        }
        for (Digit d = 1; d <= 6; ++d) {
            w.push_back(d);
            rec();
            w.pop_back();
        }
    };
    rec();
    // from the rational itself, against the alternating series
    std::uint64_t rational_checks = 0;
    oracle::for_each_word({1, 2, 3, 4, 5, 6}, 7, [&](const Word& word) {
        if (word.back() < 2) {
            return;
        }
        ++rational_checks;
        const DyadicRational q = question_mark(oracle::fold(word));
        failures += q.value() != question_mark_series(word) || box_inverse(q, 64) != word;
    });
    const bool two_fifths = question_mark(Rational(2, 5)).value() == Rational(3, 8);
    const Word ones(std::vector<Digit>(60, 1));
    const double golden_gap = std::abs(to_double(question_mark(ones).value() - Rational(2, 3)));
    // ? is only Holder continuous at the golden point, so rounding the input moves the value by about 1e-12;
    // the double path is judged against the exact value at the rounded input
    const double golden_in = std::numbers::phi - 1.0;
    const double golden_approx = std::abs(question_mark_approx(golden_in) - 2.0 / 3.0);
    const double golden_exact = to_double(question_mark(exact_rational(golden_in)).value());
    const double golden_path = std::abs(question_mark_approx(golden_in) - golden_exact);
    Detail msg;
    msg << failures << " round-trip failures over " << words << " words plus " << rational_checks
        << " rational checks; ?(2/5) = 3/8 " << (two_fifths ? "yes" : "NO") << "; |?([0;1^60]) - 2/3| = " << golden_gap
        << ", |?(golden) - 2/3| = " << golden_approx
        << " (" << golden_path << " from the exact value at the rounded input); " << seconds_since(t0) << " s";
    return {failures == 0 && two_fifths && golden_gap <= std::ldexp(1.0, -59) && golden_path <= 1e-15
            && golden_approx <= 1e-11, msg.str()};
}

struct Criterion {
    int number;
    const char* label;
    Outcome (*check)();
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all{
        {1, "dimension_B2", dimension_b2},
        {2, "jarnik_monotonicity", jarnik_monotonicity},
        {3, "minkowski_tail_law", minkowski_tail_law},
        {4, "minkowski_dimension_crosscheck", minkowski_dimension_crosscheck},
        {5, "salem_decay_fit", salem_decay_fit},
        {6, "fourier_oracle_agreement", fourier_oracle_agreement},
        {7, "stationary_phase_audit", stationary_phase_audit},
        {8, "regular_words", regular_words},
        {9, "exhaustive_continuants", exhaustive_continuants},
        {10, "equidistribution", equidistribution},
        {11, "question_mark_exactness", question_mark_exactness},
    };
    return all;
}

bool report(const Criterion& c)
{
    Outcome o;
    try {
        o = c.check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << c.number << " " << c.label << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << std::endl;
    return o.pass;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        wanted.push_back(std::atoi(argv[i]));
    }
    bool ok = true;
    bool ran = false;
    for (const Criterion& c : criteria()) {
        if (wanted.empty() || std::find(wanted.begin(), wanted.end(), c.number) != wanted.end()) {
            ran = true;
            ok = report(c) && ok;
        }
    }
    if (!ran) {
        std::cerr << "usage: acceptance [criterion numbers 1..11]\n";
        return 2;
    }
    return ok ? 0 : 1;
}
