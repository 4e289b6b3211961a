#include "gaussline/sampling.hpp"
#include "gaussline/errors.hpp"

#include <cmath>
#include <limits>
#include <variant>

namespace gaussline {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : state_(splitmix64(seed ^ splitmix64(stream ^ 0x6a09e667f3bcc909ULL)))
{
}

std::uint64_t CounterRng::next()
{
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform()
{
    return std::ldexp(static_cast<double>((next() >> 11) + 1), -53);
}

namespace {

const double kLog2 = std::log(2.0);

// Conditional state of a partially drawn word: enough to get the next
// digit's law without touching big integers.
struct DrawState {
    Branch branch;
    double r = 0.0; // q_prev / q
    double s = 1.0; // (p_prev + q_prev) / (p + q)

    void advance(Digit d)
    {
        branch = branch.child(d);
        // Only ratios of the entries matter for the conditional laws, so
        // rescale before they overflow on very long words.
        if (branch.q > 1e200) {
            branch.p_prev *= 1e-200;
            branch.p *= 1e-200;
            branch.q_prev *= 1e-200;
            branch.q *= 1e-200;
        }
        const double a = static_cast<double>(d);
        r = 1.0 / (a + r);
        s = 1.0 / (a + s);
    }
};

Digit clamp_digit(double v)
{
    if (!(v >= 1.0)) {
        return 1;
    }
    if (v >= 9.0e18) {
        return static_cast<Digit>(9.0e18);
    }
    return static_cast<Digit>(v);
}

// Lebesgue: P(a >= D | prefix) = (1 + r) / (D + r).
Digit lebesgue_digit(const DrawState& st, double u)
{
    return clamp_digit(std::floor((1.0 + st.r) / u - st.r));
}

// Gauss: P(a >= D | prefix) = F(1/D) / F(1) with
// F(Y) = int_0^Y dy / ((1 + r y)(1 + s y)).
double gauss_F(double Y, double r, double s)
{
    const double base = Y / (1.0 + r * Y);
    const double z = (s - r) * base;
    const double L = (z == 0.0) ? 1.0 : std::log1p(z) / z;
    return base * L;
}

Digit gauss_digit(const DrawState& st, double u)
{
    const double total = gauss_F(1.0, st.r, st.s);
    auto at_least = [&](double D) { return gauss_F(1.0 / D, st.r, st.s) / total; };
    // Largest D with at_least(D) >= u; the Lebesgue law is a close guess.
    double lo = std::max(1.0, std::floor(0.5 * lebesgue_digit(st, u)));
    double hi = 2.0 * static_cast<double>(lebesgue_digit(st, u)) + 2.0;
    while (at_least(lo) < u && lo > 1.0) {
        lo = std::max(1.0, std::floor(lo / 2.0));
    }
    while (at_least(hi) >= u && hi < 9.0e18) {
        hi *= 2.0;
    }
    while (hi - lo > 1.0) {
        const double mid = std::floor(0.5 * (lo + hi));
        if (at_least(mid) >= u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return clamp_digit(lo);
}

Digit draw_digit(const MeasureModel& model, const MassRule& rule, const DrawState& st, CounterRng& rng,
                 std::vector<double>& scratch)
{
    const double u = rng.uniform();
    return std::visit(
        [&](const auto& m) -> Digit {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, BernoulliModel>) {
                return m.law.inverse_cdf(u * m.law.total());
            } else if constexpr (std::is_same_v<M, FinitePotentialModel>) {
                rule.children(st.branch, 1.0, scratch);
                double acc = 0.0;
                for (std::size_t i = 0; i < scratch.size(); ++i) {
                    acc += scratch[i];
                    if (u <= acc) {
                        return rule.digits()[i];
                    }
                }
                return rule.digits().back();
            } else if constexpr (std::is_same_v<M, LebesgueModel>) {
                return lebesgue_digit(st, u);
            } else {
                return gauss_digit(st, u);
            }
        },
        model.kind());
}

} // namespace

double sample(const MeasureModel& model, std::uint64_t seed, int depth, std::uint64_t index)
{
    if (depth < 8) {
        throw DomainError("sample: depth must be >= 8");
    }
    CounterRng rng(seed, index);
    if (std::holds_alternative<LebesgueModel>(model.kind())) {
        return rng.uniform();
    }
    if (std::holds_alternative<GaussModel>(model.kind())) {
        return std::expm1(rng.uniform() * kLog2);
    }
    const MassRule rule(model, false);
    std::vector<double> scratch;
    DrawState st;
    for (int k = 0; k < depth; ++k) {
        st.advance(draw_digit(model, rule, st, rng, scratch));
        // Once the cylinder is far below double resolution, further digits
        // cannot move the midpoint.
        if (st.branch.q > 1e17) {
            break;
        }
    }
    return st.branch.midpoint();
}

Word sample_word(const MeasureModel& model, CounterRng& rng, double min_log_q)
{
    const MassRule rule(model, false);
    std::vector<double> scratch;
    DrawState st;
    Word w;
    double log_q = 0.0;
    while (log_q < min_log_q) {
        const Digit d = draw_digit(model, rule, st, rng, scratch);
        w.push_back(d);
        // log q_k = sum log(a_k + r_{k-1})
        log_q += std::log(static_cast<double>(d) + st.r);
        st.advance(d);
    }
    return w;
}

Rational cylinder_midpoint(const Word& w)
{
    const ConvergentQuad c = continuants(w);
    return (Rational(c.p, c.q) + Rational(c.p + c.p_prev, c.q + c.q_prev)) / 2;
}

} // namespace gaussline
