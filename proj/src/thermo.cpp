#include "gaussline/thermo.hpp"
#include "gaussline/cylinder_quadrature.hpp"
#include "gaussline/errors.hpp"
#include "gaussline/word_kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace gaussline {

namespace {

const double kLogTheta = std::log(std::numbers::phi);

double digits_count_power(std::size_t k, int depth)
{
    double words = 1.0;
    for (int i = 0; i < depth; ++i) {
        words *= static_cast<double>(k);
    }
    return words;
}

void require_budget(std::size_t k, int depth, const Limits& limits)
{
    if (digits_count_power(k, depth) > static_cast<double>(limits.budget)) {
        throw ResourceError("enumeration of " + std::to_string(k) + "^" + std::to_string(depth) +
                            " words exceeds the budget of " + std::to_string(limits.budget));
    }
}

// Calls visit(word) for every word of 𝒜^depth in lexicographic order.
template <class Visit>
void for_each_word(const std::vector<Digit>& digits, int depth, Visit&& visit)
{
    const std::size_t k = digits.size();
    std::vector<std::size_t> idx(static_cast<std::size_t>(depth), 0);
    std::vector<Digit> w(static_cast<std::size_t>(depth), digits.front());
    while (true) {
        visit(Word(w));
        std::size_t j = idx.size();
        while (j > 0) {
            --j;
            if (++idx[j] < k) {
                w[j] = digits[idx[j]];
                break;
            }
            idx[j] = 0;
            w[j] = digits[0];
            if (j == 0) {
                return;
            }
        }
        if (idx.empty()) {
            return;
        }
    }
}

// Depth-first walk over 𝒜^depth split into prefix partitions that run under
// OpenMP; leaf(acc, branch, digit_sum) is called for every word, and the
// per-partition accumulators are returned in prefix order.
template <class Acc, class Leaf>
std::vector<Acc> partitioned_walk(const LinearForm& form, const std::vector<Digit>& digits, int depth,
                                  const Limits& limits, const Leaf& leaf)
{
    const std::size_t k = digits.size();
    std::vector<double> ell(k, 0.0);
    if (form.has_digit_term()) {
        for (std::size_t i = 0; i < k; ++i) {
            ell[i] = form.digit_term(digits[i]);
        }
    }
    struct Node {
        Branch b;
        double lsum;
    };
    int L = 0;
    std::size_t count = 1;
    while (L < depth && count < static_cast<std::size_t>(std::max(1, limits.partitions))) {
        count *= k;
        ++L;
    }
    std::vector<Node> level{{Branch{}, 0.0}};
    for (int m = 0; m < L; ++m) {
        std::vector<Node> next;
        next.reserve(level.size() * k);
        for (const Node& n : level) {
            for (std::size_t i = 0; i < k; ++i) {
                next.push_back({n.b.child(digits[i]), n.lsum + ell[i]});
            }
        }
        level = std::move(next);
    }
    std::vector<Acc> out(level.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(level.size()); ++i) {
        Acc& acc = out[static_cast<std::size_t>(i)];
        std::vector<Node> stack{level[static_cast<std::size_t>(i)]};
        while (!stack.empty()) {
            const Node n = stack.back();
            stack.pop_back();
            if (n.b.depth == depth) {
                leaf(acc, n.b, n.lsum);
                continue;
            }
            for (std::size_t j = k; j-- > 0;) {
                stack.push_back({n.b.child(digits[j]), n.lsum + ell[j]});
            }
        }
    }
    return out;
}

// Running log-sum-exp.
struct LogSum {
    double top = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    void add(double v)
    {
        if (!(v > -std::numeric_limits<double>::infinity())) {
            return;
        }
        if (v > top) {
            sum = sum * std::exp(top - v) + 1.0;
            top = v;
        } else {
            sum += std::exp(v - top);
        }
    }
    void merge(const LogSum& o)
    {
        if (o.sum == 0.0) {
            return;
        }
        if (o.top > top) {
            sum = sum * std::exp(top - o.top) + o.sum;
            top = o.top;
        } else {
            sum += o.sum * std::exp(o.top - top);
        }
    }
    double log() const { return top + std::log(sum); }
};

} // namespace

double periodic_point(const Word& w)
{
    if (w.empty()) {
        throw DomainError("periodic_point needs a nonempty word");
    }
    double x = branch_of(w).midpoint();
    for (int i = 0; i < 200; ++i) {
        const double next = inverse_branch(w, x);
        if (std::abs(next - x) < 1e-15) {
            return next;
        }
        x = next;
    }
    return x;
}

double pressure_tail(const LinearForm& form, Digit a_max)
{
    auto term = [&](Digit m) {
        const double md = static_cast<double>(m);
        const double fixed = 0.5 * (std::sqrt(md * md + 4.0) - md);
        const double ell = form.has_digit_term() ? form.digit_term(m) : 0.0;
        return std::exp(ell + 2.0 * form.t * std::log(fixed));
    };
    std::vector<double> inc;
    Digit lo = a_max;
    double total = 0.0;
    constexpr Digit kMaxTerms = Digit{1} << 24;
    while (true) {
        const Digit hi = lo * 2;
        double s = 0.0;
        for (Digit m = lo + 1; m <= hi; ++m) {
            s += term(m);
        }
        inc.push_back(s);
        total += s;
        lo = hi;
        if (s <= 1e-17 * total || s == 0.0) {
            return total;
        }
        const std::size_t n = inc.size();
        if (n >= 3) {
            const double r1 = inc[n - 1] / inc[n - 2];
            const double r0 = inc[n - 2] / inc[n - 3];
            if (r1 >= 0.999 && r0 >= 0.999) {
                throw PrecisionError("infinite pressure suspected: tail increments do not shrink under truncation doubling");
            }
            if (std::abs(r1 - r0) < 0.01 || hi > kMaxTerms) {
                if (r1 >= 0.999) {
                    throw PrecisionError("infinite pressure suspected: tail increments do not shrink under truncation doubling");
                }
                return total + inc[n - 1] * r1 / (1.0 - r1);
            }
        }
    }
}

PressureEstimate pressure_estimate(const Potential& phi, const Alphabet& alphabet, int depth, const Limits& limits)
{
    const LinearForm form = linearize(phi);
    const PressureSums sums = pressure_sums(form, alphabet.digits(), depth, std::max(1, depth / 2), limits);
    PressureEstimate est;
    est.depth = depth;
    est.alphabet = alphabet;
    est.words = sums.words;
    for (int m = sums.depth_min; m <= depth; ++m) {
        const std::size_t i = static_cast<std::size_t>(m - sums.depth_min);
        if (!(sums.scaled_sums[i] > 0.0) || !std::isfinite(sums.scaled_sums[i])) {
            throw RangeError("pressure sum left double range at depth " + std::to_string(m));
        }
        est.sequence.emplace_back(m, (sums.shifts[i] + std::log(sums.scaled_sums[i])) / m);
    }
    est.value = est.sequence.back().second;
    if (alphabet.kind() == Alphabet::Kind::TruncatedNaturals) {
        est.tail_bound = pressure_tail(form, alphabet.max_digit());
        if (alphabet.tail_bound() > 0.0 && est.tail_bound > alphabet.tail_bound()) {
            std::ostringstream msg;
            msg << "pressure tail beyond a_max = " << alphabet.max_digit() << " is " << est.tail_bound
                << ", above the declared bound " << alphabet.tail_bound();
            throw PrecisionError(msg.str());
        }
    }
    return est;
}

PressureEstimate pressure_estimate_reference(const Potential& phi, const Alphabet& alphabet, int depth,
                                             const Limits& limits)
{
    if (depth < 1) {
        throw DomainError("pressure enumeration needs depth >= 1");
    }
    require_budget(alphabet.size(), depth, limits);
    const LinearForm form = linearize(phi);
    PressureEstimate est;
    est.depth = depth;
    est.alphabet = alphabet;
    for (int m = std::max(1, depth / 2); m <= depth; ++m) {
        LogSum acc;
        for_each_word(alphabet.digits(), m, [&](const Word& w) {
            acc.add(birkhoff_sum(form, w, periodic_point(w)));
        });
        est.sequence.emplace_back(m, acc.log() / m);
    }
    est.words = static_cast<std::uint64_t>(digits_count_power(alphabet.size(), depth));
    est.value = est.sequence.back().second;
    if (alphabet.kind() == Alphabet::Kind::TruncatedNaturals) {
        est.tail_bound = pressure_tail(form, alphabet.max_digit());
    }
    return est;
}

PressureRoot pressure_root_detailed(const Alphabet& alphabet, double s_lo, double s_hi, int depth, double tol,
                                    const Limits& limits)
{
    if (!(tol > 0.0)) {
        throw DomainError("pressure_root: tol must be positive");
    }
    if (!(s_lo < s_hi)) {
        throw BracketError("pressure_root: need s_lo < s_hi");
    }
    PressureRoot r;
    auto P = [&](double s) {
        const double v = pressure_estimate(Potential::tlog(s), alphabet, depth, limits).value;
        r.history.emplace_back(s, v);
        ++r.evaluations;
        return v;
    };
    double p_lo = P(s_lo);
    double p_hi = P(s_hi);
    if (!(p_lo > 0.0 && p_hi < 0.0)) {
        std::ostringstream msg;
        msg << "bracket [" << s_lo << ", " << s_hi << "] does not straddle the pressure zero: P(" << s_lo
            << ") = " << p_lo << ", P(" << s_hi << ") = " << p_hi;
        throw BracketError(msg.str());
    }
    double lo = s_lo;
    double hi = s_hi;
    while (hi - lo >= tol) {
        const double mid = 0.5 * (lo + hi);
        const double p = P(mid);
        if (!(p <= p_lo && p >= p_hi)) {
            std::ostringstream msg;
            msg << "pressure is not decreasing in s: P(" << mid << ") = " << p << " outside [" << p_hi << ", "
                << p_lo << "]";
            throw PrecisionError(msg.str());
        }
        if (p > 0.0) {
            lo = mid;
            p_lo = p;
        } else {
            hi = mid;
            p_hi = p;
        }
    }
    r.lo = lo;
    r.hi = hi;
    r.s = 0.5 * (lo + hi);
    return r;
}

double pressure_root(const Alphabet& alphabet, double s_lo, double s_hi, int depth, double tol, const Limits& limits)
{
    return pressure_root_detailed(alphabet, s_lo, s_hi, depth, tol, limits).s;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kPi2Over6Log2 = std::numbers::pi * std::numbers::pi / (6.0 * std::numbers::ln2);

// Chebyshev interpolant on [0,1] (second-kind points, barycentric form).
class Chebyshev {
public:
    template <class F>
    Chebyshev(const F& f, int n) : x_(static_cast<std::size_t>(n) + 1), f_(x_.size()), w_(x_.size())
    {
        for (int j = 0; j <= n; ++j) {
            const auto i = static_cast<std::size_t>(j);
            x_[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * j / n));
            f_[i] = f(x_[i]);
            w_[i] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
        }
    }

    double operator()(double x) const
    {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < x_.size(); ++i) {
            const double d = x - x_[i];
            if (d == 0.0) {
                return f_[i];
            }
            const double t = w_[i] / d;
            num += t * f_[i];
            den += t;
        }
        return num / den;
    }

private:
    std::vector<double> x_, f_, w_;
};

// h(y) = sum_a p_a log(a + y).  For a product measure with digit law p,
// lambda = int -2 log x dmu = 2 int h dmu because x = 1/(a_1 + Tx) and Tx is
// independent of a_1 with law mu.
double digit_log_mean(const DigitLaw& law, double y)
{
    double s = 0.0;
    const std::size_t K = law.explicit_size();
    for (std::size_t a = 1; a <= K; ++a) {
        const double p = law.prob(a);
        if (p > 0.0) {
            s += p * std::log(static_cast<double>(a) + y);
        }
    }
    if (!law.tail()) {
        return s;
    }
    const DigitTail& t = *law.tail();
    if (t.kind == DigitTail::Kind::Geometric) {
        for (Digit a = K + 1;; ++a) {
            // log(1 + y) vanishes at y = 0, so stop on the weight, not the term
            const double p = law.prob(a);
            s += p * std::log(static_cast<double>(a) + y);
            if (p == 0.0 || (a > 1 && p * std::log(static_cast<double>(a) + 1.0) < 1e-20 * s)) {
                break;
            }
        }
        return s;
    }
    const Digit stop = static_cast<Digit>(K) + (Digit{1} << 17);
    for (Digit a = K + 1; a < stop; ++a) {
        s += law.prob(a) * std::log(static_cast<double>(a) + y);
    }
    // int_A^inf c x^-k log x dx
    const double A = static_cast<double>(stop) - 0.5;
    const double k = t.exponent;
    s += t.scale * std::pow(A, 1.0 - k) * (std::log(A) / (k - 1.0) + 1.0 / ((k - 1.0) * (k - 1.0)));
    return s;
}

QuadOptions stats_quadrature(int depth, const StatsOptions& opt)
{
    QuadOptions q;
    q.leaf_osc = opt.leaf_osc;
    q.mass_floor = opt.leaf_osc * 1e-6;
    q.max_depth = depth;
    q.max_leaves = opt.limits.quadrature_leaves;
    q.partitions = opt.limits.partitions;
    return q;
}

// Normalised depth-n weights of a potential model: returns
// (log Z, sum pi log pi, sum pi * (-log|T_a'(x0)|)).
struct PotentialMoments {
    double log_z = 0.0;
    double neg_entropy = 0.0;
    double mean_log_expansion = 0.0;
    std::uint64_t words = 0;
};

PotentialMoments potential_moments(const FinitePotentialModel& m, int depth, const Limits& limits)
{
    const auto& digits = m.alphabet.digits();
    require_budget(digits.size(), depth, limits);
    struct Acc {
        std::vector<double> logw;
        std::vector<double> expansion;
    };
    const auto parts = partitioned_walk<Acc>(m.form, digits, depth, limits,
                                             [&](Acc& acc, const Branch& b, double lsum) {
                                                 const double ld = b.log_derivative(kWeightPoint);
                                                 acc.logw.push_back(lsum + m.form.t * ld);
                                                 acc.expansion.push_back(-ld);
                                             });
    LogSum z;
    for (const Acc& a : parts) {
        for (double v : a.logw) {
            z.add(v);
        }
    }
    PotentialMoments out;
    out.log_z = z.log();
    for (const Acc& a : parts) {
        for (std::size_t i = 0; i < a.logw.size(); ++i) {
            const double lp = a.logw[i] - out.log_z;
            const double p = std::exp(lp);
            out.neg_entropy += p * lp;
            out.mean_log_expansion += p * a.expansion[i];
            ++out.words;
        }
    }
    return out;
}

void check_truncation(double truncated, const StatsOptions& opt)
{
    if (truncated > opt.max_truncated) {
        std::ostringstream msg;
        msg << "truncated mass " << truncated << " exceeds the accepted bound " << opt.max_truncated;
        throw PrecisionError(msg.str());
    }
}

} // namespace

Estimate entropy_estimate(const MeasureModel& model, int depth, const StatsOptions& opt)
{
    if (depth < 1) {
        throw DomainError("entropy_estimate: depth must be >= 1");
    }
    Estimate e;
    if (const auto* b = std::get_if<BernoulliModel>(&model.kind())) {
        // For a product measure sum_{|a|=n} -mu log mu = n M^(n-1) H_1 over
        // the enumerated digits, where M is their total mass.
        if (b->truncate_at) {
            const Digit top = *b->truncate_at;
            const double M = 1.0 - b->law.tail_from(top + 1);
            const double H1 = b->law.entropy_upto(top);
            e.value = std::pow(M, depth - 1) * H1;
            e.truncated_mass = 1.0 - std::pow(M, depth);
            e.method = "product_truncated";
            check_truncation(e.truncated_mass, opt);
        } else {
            e.value = b->law.entropy();
            e.method = "product_closed_form";
        }
        return e;
    }
    if (const auto* f = std::get_if<FinitePotentialModel>(&model.kind())) {
        const PotentialMoments pm = potential_moments(*f, depth, opt.limits);
        e.value = -pm.neg_entropy / depth;
        e.method = "enumeration_normalised";
        e.work = pm.words;
        return e;
    }
    // Lebesgue and Gauss measure are equivalent with bounded density ratio,
    // so their depth-n entropies share the limit pi^2 / (6 log 2).
    e.value = kPi2Over6Log2;
    e.method = "closed_form";
    return e;
}

Estimate lyapunov_estimate(const MeasureModel& model, int depth, const StatsOptions& opt)
{
    if (depth < 1) {
        throw DomainError("lyapunov_estimate: depth must be >= 1");
    }
    Estimate e;
    if (const auto* b = std::get_if<BernoulliModel>(&model.kind())) {
        const DigitLaw& law = b->law;
        const Chebyshev h([&](double y) { return digit_log_mean(law, y) / law.total(); }, 48);
        const MeasureModel full = MeasureModel::bernoulli(law);
        const auto r = integrate_parallel<double>(
            full, [&](double y) { return h(y); }, [](double lo, double hi) { return hi - lo; },
            stats_quadrature(depth, opt));
        e.value = 2.0 * r.value;
        e.error = 2.0 * r.error + 1e-12;
        e.truncated_mass = model.truncated_mass();
        e.method = "cylinder_quadrature";
        e.work = r.leaves;
        return e;
    }
    if (const auto* f = std::get_if<FinitePotentialModel>(&model.kind())) {
        const PotentialMoments pm = potential_moments(*f, depth, opt.limits);
        e.value = pm.mean_log_expansion / depth;
        e.error = std::log(4.0) / depth;
        e.method = "enumeration_normalised";
        e.work = pm.words;
        return e;
    }
    e.value = kPi2Over6Log2;
    e.method = "closed_form";
    return e;
}

Estimate kinney_dimension(const MeasureModel& model, int depth, const StatsOptions& opt)
{
    if (!model.is_minkowski()) {
        throw DomainError("kinney_dimension applies to the Minkowski model only");
    }
    if (depth < 1) {
        throw DomainError("kinney_dimension: depth must be >= 1");
    }
    const auto r = integrate_parallel<double>(
        model, [](double x) { return std::log1p(x); },
        [](double lo, double hi) { return std::log1p((hi - lo) / (1.0 + lo)); }, stats_quadrature(depth, opt));
    Estimate e;
    const double I = r.value;
    e.value = std::numbers::ln2 / (2.0 * I);
    e.error = std::numbers::ln2 / (2.0 * (I - r.error) * (I - r.error)) * r.error;
    e.method = "cylinder_quadrature";
    e.work = r.leaves;
    return e;
}

MeasureStats measure_stats(const MeasureModel& model, int depth, const StatsOptions& opt)
{
    const Estimate h = entropy_estimate(model, depth, opt);
    const Estimate l = lyapunov_estimate(model, depth, opt);
    MeasureStats s;
    s.entropy_h = h.value;
    s.lyapunov_lambda = l.value;
    s.dimension_s = h.value / l.value;
    s.depth = depth;
    s.method = h.method + "/" + l.method;
    return s;
}

TransferResult transfer_apply(const Potential& phi, const Alphabet& alphabet,
                              const std::function<std::complex<double>(double)>& f, double x, int depth,
                              const Limits& limits)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw RangeError("transfer_apply: x must lie in [0,1]");
    }
    if (depth < 1) {
        throw DomainError("transfer_apply: depth must be >= 1");
    }
    require_budget(alphabet.size(), depth, limits);
    const LinearForm form = linearize(phi);
    struct Acc {
        std::complex<double> sum{0.0, 0.0};
        double weight = 0.0;
        std::uint64_t words = 0;
    };
    const auto parts = partitioned_walk<Acc>(form, alphabet.digits(), depth, limits,
                                             [&](Acc& acc, const Branch& b, double lsum) {
                                                 const double w = std::exp(lsum + form.t * b.log_derivative(x));
                                                 acc.sum += w * f(b.at(x));
                                                 acc.weight += w;
                                                 ++acc.words;
                                             });
    TransferResult r;
    double weight = 0.0;
    for (const Acc& a : parts) {
        r.value += a.sum;
        weight += a.weight;
        r.words += a.words;
    }
    double sup_f = 0.0;
    for (double y : {0.0, 0.5, 1.0}) {
        sup_f = std::max(sup_f, std::abs(f(y)));
    }
    r.error = 64.0 * std::numeric_limits<double>::epsilon() * weight * std::max(1.0, sup_f);
    if (alphabet.kind() == Alphabet::Kind::TruncatedNaturals) {
        // Weight of the missing digits at depth 1 at the point x, then a
        // union bound over the n positions a word can leave the alphabet.
        double tail = 0.0;
        const Digit top = alphabet.max_digit();
        if (form.has_digit_term() && form.laws.size() == 1 && form.laws[0].first == 1.0 && form.t == 0.0) {
            tail = form.laws[0].second.tail_from(top + 1);
        } else {
            tail = pressure_tail(form, top);
        }
        const double per_level = std::max(1.0, weight > 0.0 ? std::pow(weight, 1.0 / depth) : 1.0);
        r.error += depth * tail * std::pow(per_level, depth - 1) * std::max(1.0, sup_f);
    }
    return r;
}

} // namespace gaussline
