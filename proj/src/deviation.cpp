#include "gaussline/deviation.hpp"
#include "gaussline/errors.hpp"
#include "gaussline/thermo.hpp"

#include "linear_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace gaussline {

namespace {

int first_level(int n)
{
    return std::max(1, n / 2);
}

// Inclusion of T_b([0,1]) in A_k(eps), tested at y = 0 and y = 1.
bool cylinder_in_regular_set(const Branch& b, double digit_sum, double t, const RegularParams& p)
{
    const double k = static_cast<double>(b.depth);
    for (double y : {0.0, 1.0}) {
        const double s_psi = b.log_derivative(y);
        const double s_phi = digit_sum + t * s_psi;
        if (!(std::abs(s_psi / k + p.lambda) < p.epsilon)) {
            return false;
        }
        if (!(s_psi < 0.0) || !(std::abs(s_phi / s_psi - p.s) < p.epsilon)) {
            return false;
        }
    }
    return true;
}

// Allowance for the double rounding of the log-space comparisons.
double rounding_allowance(int k, const RegularParams& p)
{
    return 1e-12 * k * (1.0 + p.lambda);
}

} // namespace

void RegularParams::validate() const
{
    const double log_theta = std::log(std::numbers::phi);
    if (!(epsilon > 0.0)) {
        throw DomainError("regular params: epsilon must be positive");
    }
    if (!(s > 0.0 && s <= 1.0)) {
        throw DomainError("regular params: s must lie in (0, 1]");
    }
    if (!(lambda >= 2.0 * log_theta - 1e-9)) {
        throw DomainError("regular params: lambda is below 2 log(golden ratio)");
    }
    if (n < 1) {
        throw DomainError("regular params: n must be >= 1");
    }
}

bool regular_membership(const Potential& phi, const Word& word, const RegularParams& params)
{
    params.validate();
    if (word.size() != static_cast<std::size_t>(params.n)) {
        throw DomainError("regular_membership: word length " + std::to_string(word.size()) + " differs from n = " +
                          std::to_string(params.n));
    }
    const LinearForm form = linearize(phi);
    Branch b;
    double digit_sum = 0.0;
    for (std::size_t i = 0; i < word.size(); ++i) {
        b = b.child(word[i]);
        if (form.has_digit_term()) {
            digit_sum += form.digit_term(word[i]);
        }
        if (b.depth >= first_level(params.n) && !cylinder_in_regular_set(b, digit_sum, form.t, params)) {
            return false;
        }
    }
    return true;
}

void BoundAudit::record(double slack)
{
    worst_slack = std::min(worst_slack, slack);
    if (slack >= 0.0) {
        ++passed;
    } else {
        ++failed;
    }
}

void BoundAudit::merge(const BoundAudit& o)
{
    passed += o.passed;
    failed += o.failed;
    worst_slack = std::min(worst_slack, o.worst_slack);
}

bool RegularAudit::ok() const
{
    return std::all_of(bounds.begin(), bounds.end(), [](const BoundAudit& b) { return b.failed == 0; });
}

void RegularAudit::merge(const RegularAudit& o)
{
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        bounds[i].merge(o.bounds[i]);
    }
}

double gibbs_constant(const MeasureModel& model)
{
    if (const auto* f = std::get_if<FinitePotentialModel>(&model.kind())) {
        return f->gibbs_constant;
    }
    if (std::holds_alternative<BernoulliModel>(model.kind())) {
        return 1.0;
    }
    // Lebesgue and Gauss measure of I_a are within a factor 4 of q_n^-2.
    return 4.0;
}

RegularAudit lemma_regular_check(const Potential& phi, const MeasureModel& model, const Word& word,
                                 const RegularParams& params)
{
    RegularAudit audit;
    const LinearForm form = linearize(phi);
    const double lam = params.lambda;
    const double eps = params.epsilon;
    const double s = params.s;
    const double log_c = std::log(gibbs_constant(model));
    const int n = static_cast<int>(word.size());
    double digit_sum = 0.0;
    for (int k = 1; k <= n; ++k) {
        if (form.has_digit_term()) {
            digit_sum += form.digit_term(word[static_cast<std::size_t>(k - 1)]);
        }
        if (k < first_level(n)) {
            continue;
        }
        const Word prefix = word.prefix(static_cast<std::size_t>(k));
        const ConvergentQuad c = continuants(prefix);
        const double lq = log_of(c.q);
        const double lq_prev = c.q_prev == 0 ? -std::numeric_limits<double>::infinity() : log_of(c.q_prev);
        const double kd = k;
        const double tol = rounding_allowance(k, params);
        auto slack = [&](double lower, double value, double upper) {
            return std::min(value - lower, upper - value) + tol;
        };

        // (1) e^{(lam-eps)k} <= q_k^2 <= 4 e^{(lam+eps)k}
        audit.bounds[0].record(slack((lam - eps) * kd, 2.0 * lq, std::log(4.0) + (lam + eps) * kd));

        // (2) e^{(-lam-eps)k}/16 <= |I|, |T'| <= e^{(-lam+eps)k}
        const double lo2 = -std::log(16.0) - (lam + eps) * kd;
        const double hi2 = (-lam + eps) * kd;
        const double log_sum = lq + std::log1p(std::exp(lq_prev - lq));
        double s2 = slack(lo2, -lq - log_sum, hi2);
        for (double x : {0.0, 1.0}) {
            const double log_d = -2.0 * (x == 0.0 ? lq : log_sum);
            s2 = std::min(s2, slack(lo2, log_d, hi2));
        }
        audit.bounds[1].record(s2);

        // (3) e^{(-s lam - 3 lam eps)k} <= w(x) <= e^{(-s lam + 3 lam eps)k}
        const double lo3 = (-s * lam - 3.0 * lam * eps) * kd;
        const double hi3 = (-s * lam + 3.0 * lam * eps) * kd;
        double s3 = std::numeric_limits<double>::infinity();
        for (double x : {0.0, 1.0}) {
            const double log_d = -2.0 * (x == 0.0 ? lq : log_sum);
            s3 = std::min(s3, slack(lo3, digit_sum + form.t * log_d, hi3));
        }
        audit.bounds[2].record(s3);

        // (4) the same window for mu(I), widened by the Gibbs constant
        const double mass = cylinder_mass(model, prefix);
        const double log_mass = mass > 0.0 ? std::log(mass) : -std::numeric_limits<double>::infinity();
        audit.bounds[3].record(slack(lo3 - log_c, log_mass, hi3 + log_c));
    }
    return audit;
}

RegularWordSet enumerate_regular(const Potential& phi, const Alphabet& alphabet, const RegularParams& params,
                                 const MeasureModel& model, const Limits& limits)
{
    params.validate();
    const auto& digits = alphabet.digits();
    const std::size_t k = digits.size();
    double words = 1.0;
    for (int i = 0; i < params.n; ++i) {
        words *= static_cast<double>(k);
    }
    if (words > static_cast<double>(limits.budget)) {
        std::ostringstream msg;
        msg << "enumerate_regular: " << k << "^" << params.n << " words exceed the budget of " << limits.budget;
        throw ResourceError(msg.str());
    }
    const LinearForm form = linearize(phi);
    const MassRule rule(model);
    const int level = first_level(params.n);

    struct Part {
        std::vector<Word> words;
        double accepted = 0.0;
        double rejected = 0.0;
        std::uint64_t visited = 0;
        RegularAudit audit;
    };
    struct Node {
        Branch b;
        double mass;
        double digit_sum;
        std::vector<Digit> w;
    };
    std::vector<Part> parts(k);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(k); ++i) {
        Part& part = parts[static_cast<std::size_t>(i)];
        const Digit d0 = digits[static_cast<std::size_t>(i)];
        std::vector<Node> stack{{Branch{}.child(d0), rule.child(Branch{}, 1.0, d0),
                                 form.has_digit_term() ? form.digit_term(d0) : 0.0, {d0}}};
        while (!stack.empty()) {
            Node node = std::move(stack.back());
            stack.pop_back();
            ++part.visited;
            if (node.b.depth >= level && !cylinder_in_regular_set(node.b, node.digit_sum, form.t, params)) {
                part.rejected += node.mass;
                continue;
            }
            if (node.b.depth == params.n) {
                part.accepted += node.mass;
                Word w(std::move(node.w));
                part.audit.merge(lemma_regular_check(phi, model, w, params));
                part.words.push_back(std::move(w));
                continue;
            }
            for (std::size_t j = k; j-- > 0;) {
                const Digit d = digits[j];
                std::vector<Digit> w = node.w;
                w.push_back(d);
                stack.push_back({node.b.child(d), rule.child(node.b, node.mass, d),
                                 node.digit_sum + (form.has_digit_term() ? form.digit_term(d) : 0.0), std::move(w)});
            }
        }
    }
    RegularWordSet out;
    out.params = params;
    for (Part& p : parts) {
        out.words.insert(out.words.end(), std::make_move_iterator(p.words.begin()),
                         std::make_move_iterator(p.words.end()));
        out.accepted_mass += p.accepted;
        out.complement_mass += p.rejected;
        out.enumerated += p.visited;
        out.audit.merge(p.audit);
    }
    // Masses are relative to the depth-n words of this alphabet.
    const double total = out.accepted_mass + out.complement_mass;
    if (total > 0.0) {
        out.accepted_mass /= total;
        out.complement_mass /= total;
    }
    return out;
}

IrregularCurve irregular_mass_curve(const Potential& phi, const MeasureModel& model, const Alphabet& alphabet,
                                    double epsilon, const std::vector<int>& n_range, const Limits& limits)
{
    IrregularCurve curve;
    StatsOptions opt;
    opt.limits = limits;
    std::vector<double> xs;
    std::vector<double> ys;
    for (int n : n_range) {
        const Estimate lam = lyapunov_estimate(model, n, opt);
        const Estimate h = entropy_estimate(model, n, opt);
        RegularParams p;
        p.epsilon = epsilon;
        p.lambda = lam.value;
        p.s = h.value / lam.value;
        p.n = n;
        const RegularWordSet set = enumerate_regular(phi, alphabet, p, model, limits);
        curve.points.push_back({n, set.complement_mass, p.lambda, p.s, set.audit.ok()});
        if (set.complement_mass > 0.0) {
            xs.push_back(n);
            ys.push_back(std::log(set.complement_mass));
        }
    }
    if (xs.size() < 2) {
        throw FitError("irregular_mass_curve: fewer than two depths with positive complement mass");
    }
    const detail::LineFit f = detail::fit_line(xs, ys);
    curve.slope = f.slope;
    curve.delta_hat = -4.0 * f.slope;
    return curve;
}

std::string to_string(TailExponent::Kind k)
{
    switch (k) {
    case TailExponent::Kind::Power:
        return "power";
    case TailExponent::Kind::Exponential:
        return "exponential";
    case TailExponent::Kind::Finite:
        return "finite";
    }
    return "unknown";
}

TailExponent tail_exponent(const MeasureModel& model, const std::vector<Digit>& n_range)
{
    TailExponent out;
    if (model.finite_support()) {
        const Digit top = model.support().back();
        if (tail_mass(model, top + 1) != 0.0) {
            throw FitError("finite-support model reports mass beyond its largest digit");
        }
        out.kind = TailExponent::Kind::Finite;
        return out;
    }
    std::vector<double> n_lin;
    std::vector<double> n_log;
    std::vector<double> y;
    for (Digit n : n_range) {
        const double m = tail_mass(model, n);
        if (!(m > 0.0)) {
            throw FitError("tail_exponent: nonpositive tail mass at n = " + std::to_string(n));
        }
        n_lin.push_back(static_cast<double>(n));
        n_log.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(m));
    }
    const detail::LineFit power = detail::fit_line(n_log, y);
    const detail::LineFit expo = detail::fit_line(n_lin, y);
    if (expo.r_squared > power.r_squared) {
        out.kind = TailExponent::Kind::Exponential;
        out.delta = std::numeric_limits<double>::infinity();
        out.rate = -expo.slope;
        out.r_squared = expo.r_squared;
    } else {
        out.kind = TailExponent::Kind::Power;
        out.delta = -power.slope;
        out.r_squared = power.r_squared;
    }
    return out;
}

int n0_threshold(const ThresholdInputs& in, int search_limit)
{
    const GoldenConstants g = golden_constants();
    const double eps = in.epsilon;
    const double lam = in.lambda;
    const double C = in.gibbs_constant;
    if (!(eps > 0.0 && in.delta > 0.0 && C >= 1.0)) {
        throw DomainError("n0_threshold: need epsilon > 0, delta > 0 and Gibbs constant >= 1");
    }
    if (!(lam / 2.0 - 2.0 * eps > 0.0)) {
        throw DomainError("n0_threshold: lambda/2 - 2 epsilon must be positive");
    }
    for (int n0 = 2; n0 <= search_limit; n0 += 2) {
        const double n = n0;
        if (!(n / 2.0 > in.n1)) {
            continue;
        }
        const double golden = 2.0 * std::log(g.c0) + n * std::log(g.theta);
        if (!(std::log(4.0) / (n / 2.0) < eps / 2.0) || !(golden > 0.0) ||
            !(std::log(4.0 * C * C) / golden < eps / 2.0)) {
            continue;
        }
        if (!(std::exp(-in.delta * n / 2.0) / (1.0 - std::exp(-in.delta)) < std::exp(-in.delta * n / 4.0))) {
            continue;
        }
        if (!(n / 2.0 >= std::log(2.0 * std::numbers::pi) + lam + 2.0 * lam * eps)) {
            continue;
        }
        if (!(eps * lam * n >= std::log(2.0 * C * std::numbers::pi) + (1.0 + 2.0 * in.s) * lam)) {
            continue;
        }
        if (!((lam / 2.0 - 2.0 * eps) * n >= std::log(192.0))) {
            continue;
        }
        return n0;
    }
    throw RangeError("n0_threshold: no admissible n0 up to " + std::to_string(search_limit));
}

} // namespace gaussline
