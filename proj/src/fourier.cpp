#include "gaussline/fourier.hpp"
#include "gaussline/cylinder_quadrature.hpp"
#include "gaussline/deviation.hpp"
#include "gaussline/errors.hpp"
#include "gaussline/sampling.hpp"

#include "linear_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace gaussline {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep)) {
        out.push_back(cur);
    }
    return out;
}

double parse_number(const std::string& text, const std::string& spec)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) {
            throw DomainError("");
        }
        return v;
    } catch (const std::exception&) {
        throw DomainError("frequency spec '" + spec + "': cannot read number '" + text + "'");
    }
}

struct UsablePoints {
    std::vector<double> log_xi;
    std::vector<double> log_abs;
    int excluded = 0;
};

UsablePoints usable_points(const std::vector<FourierPoint>& points, std::pair<double, double> window)
{
    UsablePoints u;
    double lo = 0.0;
    double hi = 0.0;
    for (const FourierPoint& p : points) {
        const double xi = std::abs(p.xi);
        if (!(xi >= window.first && xi <= window.second) || xi == 0.0) {
            continue;
        }
        const double mag = std::abs(p.value);
        if (!(mag > p.error_bound)) {
            ++u.excluded;
            continue;
        }
        if (u.log_xi.empty()) {
            lo = hi = xi;
        }
        lo = std::min(lo, xi);
        hi = std::max(hi, xi);
        u.log_xi.push_back(std::log(xi));
        u.log_abs.push_back(std::log(mag));
    }
    if (u.log_xi.size() < 8) {
        throw FitError("fit_decay: " + std::to_string(u.log_xi.size()) +
                       " usable points in the window (8 needed); " + std::to_string(u.excluded) +
                       " excluded as below their error bound");
    }
    if (!(hi >= 100.0 * lo)) {
        std::ostringstream msg;
        msg << "fit_decay: usable points span [" << lo << ", " << hi << "], less than two decades";
        throw FitError(msg.str());
    }
    return u;
}

} // namespace

std::complex<double> unit_phase(double xi, double x)
{
    const double p = xi * x;
    const double e = std::fma(xi, x, -p);
    const double frac = (p - std::floor(p)) + e;
    return std::polar(1.0, -kTwoPi * frac);
}

FourierPoint transform_cylinder(const MeasureModel& model, double xi, double tol, const Limits& limits)
{
    if (!(tol > 0.0)) {
        throw DomainError("transform_cylinder: tol must be positive");
    }
    if (!std::isfinite(xi)) {
        throw DomainError("transform_cylinder: frequency must be finite");
    }
    FourierPoint fp;
    fp.xi = xi;
    fp.method = "cylinder";
    if (xi == 0.0) {
        fp.value = {1.0, 0.0};
        return fp;
    }
    QuadOptions opt;
    opt.leaf_osc = tol;
    opt.mass_floor = tol / static_cast<double>(limits.quadrature_leaves);
    opt.osc_cap = 2.0;
    opt.max_leaves = limits.quadrature_leaves;
    opt.partitions = limits.partitions;
    const double scale = kTwoPi * std::abs(xi);
    const auto r = integrate_parallel<std::complex<double>>(
        model, [xi](double x) { return unit_phase(xi, x); },
        [scale](double lo, double hi) { return scale * (hi - lo); }, opt);
    fp.value = r.value;
    fp.error_bound = r.error;
    fp.work = r.leaves;
    return fp;
}

FourierPoint transform_mc(const MeasureModel& model, double xi, std::uint64_t n_samples, std::uint64_t seed)
{
    if (n_samples < 100) {
        throw DomainError("transform_mc: at least 100 samples are required");
    }
    FourierPoint fp;
    fp.xi = xi;
    fp.method = "montecarlo";
    fp.work = n_samples;
    fp.error_bound = 3.0 / std::sqrt(static_cast<double>(n_samples));
    if (xi == 0.0) {
        fp.value = {1.0, 0.0};
        return fp;
    }
    constexpr std::uint64_t kChunks = 64;
    std::vector<std::complex<double>> partial(kChunks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(kChunks); ++c) {
        const std::uint64_t begin = n_samples * static_cast<std::uint64_t>(c) / kChunks;
        const std::uint64_t end = n_samples * static_cast<std::uint64_t>(c + 1) / kChunks;
        std::complex<double> s{0.0, 0.0};
        for (std::uint64_t j = begin; j < end; ++j) {
            s += unit_phase(xi, sample(model, seed, 64, j));
        }
        partial[static_cast<std::size_t>(c)] = s;
    }
    std::complex<double> total{0.0, 0.0};
    for (const auto& s : partial) {
        total += s;
    }
    fp.value = total / static_cast<double>(n_samples);
    return fp;
}

std::vector<double> log_frequencies(double lo, double hi, int per_decade)
{
    if (!(lo > 0.0 && hi >= lo) || per_decade < 1) {
        throw DomainError("log frequencies need 0 < lo <= hi and a positive density");
    }
    const int steps = static_cast<int>(std::lround(per_decade * std::log10(hi / lo)));
    std::vector<double> out;
    for (int i = 0; i <= steps; ++i) {
        out.push_back(i == steps ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / std::max(steps, 1)));
    }
    return out;
}

std::vector<double> parse_frequencies(const std::string& spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw DomainError("frequency spec '" + spec + "' must start with int:, log: or list:");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    std::vector<double> out;
    if (kind == "int") {
        const auto f = split(rest, ':');
        if (f.size() != 2) {
            throw DomainError("frequency spec '" + spec + "': expected int:a:b");
        }
        const double a = parse_number(f[0], spec);
        const double b = parse_number(f[1], spec);
        if (a != std::floor(a) || b != std::floor(b) || a > b) {
            throw DomainError("frequency spec '" + spec + "': need integers a <= b");
        }
        for (double x = a; x <= b; x += 1.0) {
            out.push_back(x);
        }
    } else if (kind == "log") {
        const auto f = split(rest, ':');
        if (f.size() != 3) {
            throw DomainError("frequency spec '" + spec + "': expected log:lo:hi:per_decade");
        }
        const double per = parse_number(f[2], spec);
        if (per != std::floor(per) || per < 1.0) {
            throw DomainError("frequency spec '" + spec + "': per_decade must be a positive integer");
        }
        out = log_frequencies(parse_number(f[0], spec), parse_number(f[1], spec), static_cast<int>(per));
    } else if (kind == "list") {
        for (const auto& item : split(rest, ',')) {
            out.push_back(parse_number(item, spec));
        }
    } else {
        throw DomainError("frequency spec '" + spec + "': unknown kind '" + kind + "'");
    }
    if (out.empty()) {
        throw DomainError("frequency spec '" + spec + "' is empty");
    }
    for (double x : out) {
        if (x < 0.0) {
            throw DomainError("frequency spec '" + spec + "': frequencies must be nonnegative");
        }
    }
    return out;
}

std::vector<ScanEntry> scan(const MeasureModel& model, const std::vector<double>& frequencies, double tol,
                            const Limits& limits)
{
    if (frequencies.empty()) {
        throw DomainError("scan: no frequencies");
    }
    std::vector<ScanEntry> out(frequencies.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(frequencies.size()); ++i) {
        ScanEntry& e = out[static_cast<std::size_t>(i)];
        e.point.xi = frequencies[static_cast<std::size_t>(i)];
        e.point.method = "cylinder";
        try {
            e.point = transform_cylinder(model, e.point.xi, tol, limits);
        } catch (const std::exception& ex) {
            e.failure = ex.what();
        }
    }
    return out;
}

DecayFit fit_decay(const std::vector<FourierPoint>& points, std::pair<double, double> window)
{
    const UsablePoints u = usable_points(points, window);
    const detail::LineFit f = detail::fit_line(u.log_xi, u.log_abs);
    DecayFit fit;
    fit.eta_hat = -f.slope;
    fit.log_c = f.intercept;
    fit.r_squared = f.r_squared;
    fit.window = window;
    fit.points_used = static_cast<int>(u.log_xi.size());
    fit.points_excluded = u.excluded;
    return fit;
}

BootstrapInterval bootstrap_decay(const std::vector<FourierPoint>& points, std::pair<double, double> window,
                                  double confidence, int resamples, std::uint64_t seed)
{
    if (!(confidence > 0.0 && confidence < 1.0) || resamples < 10) {
        throw DomainError("bootstrap_decay: need confidence in (0,1) and at least 10 resamples");
    }
    const UsablePoints u = usable_points(points, window);
    const std::size_t n = u.log_xi.size();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<double> etas;
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (int r = 0; r < resamples; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = pick(rng);
            x[i] = u.log_xi[j];
            y[i] = u.log_abs[j];
        }
        try {
            etas.push_back(-detail::fit_line(x, y).slope);
        } catch (const FitError&) {
            // every draw hit one abscissa; skip it
        }
    }
    if (etas.size() < 10) {
        throw FitError("bootstrap_decay: too few nondegenerate resamples");
    }
    std::sort(etas.begin(), etas.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(etas.size() - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(i);
        return i + 1 < etas.size() ? etas[i] * (1.0 - frac) + etas[i + 1] * frac : etas[i];
    };
    const double tail = 0.5 * (1.0 - confidence);
    return {quantile(tail), quantile(1.0 - tail), static_cast<int>(etas.size())};
}

EtaConstants eta_constants(double s)
{
    if (!(s > 0.5 && s <= 1.0)) {
        throw DomainError("eta_constants: s must lie in (1/2, 1]");
    }
    const double den = (4.0 - s) * (1.0 + 2.0 * s);
    const EtaConstants c{(2.0 * s * s - s) / den, (8.0 * s * s * s + 10.0 * s * s - s) / den};
    if (!(c.rho_s > c.eta_s && c.eta_s > 0.0)) {
        throw PrecisionError("eta_constants: ordering rho_s > eta_s > 0 failed");
    }
    return c;
}

int depth_for_frequency(double u, double s, double lambda)
{
    if (!(u >= 1.0 && s > 0.0 && lambda > 0.0)) {
        throw DomainError("depth_for_frequency: need u >= 1, s > 0, lambda > 0");
    }
    return static_cast<int>(std::floor(std::log(u) / ((1.0 + 2.0 * s) * lambda)));
}

OperatorSplit transform_operator_split(const MeasureModel& model, const Potential& potential,
                                       const Alphabet& alphabet, double xi, int n, double epsilon, double lambda,
                                       double s, const Limits& limits)
{
    if (alphabet.kind() != Alphabet::Kind::Finite) {
        throw DomainError("transform_operator_split needs a finite alphabet");
    }
    RegularParams params;
    params.epsilon = epsilon;
    params.lambda = lambda;
    params.s = s;
    params.n = n;
    params.validate();
    const auto& digits = alphabet.digits();
    double words = 1.0;
    for (int i = 0; i < n; ++i) {
        words *= static_cast<double>(digits.size());
    }
    if (words > static_cast<double>(limits.budget)) {
        throw ResourceError("transform_operator_split: " + std::to_string(digits.size()) + "^" +
                            std::to_string(n) + " words exceed the budget of " + std::to_string(limits.budget));
    }
    const MassRule rule(model);
    const double scale = kTwoPi * std::abs(xi);

    struct Part {
        std::complex<double> full{0.0, 0.0};
        std::complex<double> regular{0.0, 0.0};
        double irregular = 0.0;
        double error = 0.0;
        double mass = 0.0;
        std::uint64_t words = 0;
    };
    struct Node {
        Branch b;
        double mass;
        std::vector<Digit> w;
    };
    std::vector<Part> parts(digits.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(digits.size()); ++i) {
        Part& part = parts[static_cast<std::size_t>(i)];
        const Digit d0 = digits[static_cast<std::size_t>(i)];
        std::vector<Node> stack{{Branch{}.child(d0), rule.child(Branch{}, 1.0, d0), {d0}}};
        while (!stack.empty()) {
            Node node = std::move(stack.back());
            stack.pop_back();
            if (node.b.depth == n) {
                const std::complex<double> term = node.mass * unit_phase(xi, node.b.midpoint());
                part.full += term;
                part.error += node.mass * std::min(2.0, scale * node.b.length());
                part.mass += node.mass;
                ++part.words;
                if (regular_membership(potential, Word(std::move(node.w)), params)) {
                    part.regular += term;
                } else {
                    part.irregular += node.mass;
                }
                continue;
            }
            for (std::size_t j = digits.size(); j-- > 0;) {
                std::vector<Digit> w = node.w;
                w.push_back(digits[j]);
                stack.push_back({node.b.child(digits[j]), rule.child(node.b, node.mass, digits[j]), std::move(w)});
            }
        }
    }
    OperatorSplit out;
    double mass = 0.0;
    for (const Part& p : parts) {
        out.full += p.full;
        out.regular += p.regular;
        out.irregular_mass += p.irregular;
        out.error_bound += p.error;
        out.words += p.words;
        mass += p.mass;
    }
    // Mass outside the alphabet (or lost to rounding) is unaccounted for.
    out.error_bound += std::abs(1.0 - mass);
    return out;
}

} // namespace gaussline
