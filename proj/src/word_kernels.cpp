#include "gaussline/word_kernels.hpp"
#include "gaussline/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace gaussline {

namespace {

constexpr std::size_t kBuffer = 4096;

struct Context {
    std::vector<double> ell;   // digit term per digit
    std::vector<double> value; // digit value as double
    int depth = 0;
    int depth_min = 1;
    double c = 0.0; // coefficient of log lambda: -2t
    std::vector<double> shift;
};

struct Accumulator {
    explicit Accumulator(int depth) : sums(static_cast<std::size_t>(depth) + 1, 0.0) {}

    std::vector<double> sums;
    double lsum[kBuffer];
    double tau[kBuffer];
    double det[kBuffer];
    std::size_t n = 0;
};

double node_term(const Context& ctx, int level, double pp, double q, double det, double lsum)
{
    const double tau = pp + q;
    const double lam = 0.5 * (tau + std::sqrt(tau * tau - 4.0 * det));
    return std::exp(lsum - ctx.shift[static_cast<std::size_t>(level)] + ctx.c * std::log(lam));
}

void flush(const Context& ctx, Accumulator& acc)
{
    const double shift = ctx.shift[static_cast<std::size_t>(ctx.depth)];
    const double c = ctx.c;
    const double* L = acc.lsum;
    const double* T = acc.tau;
    const double* S = acc.det;
    double total = 0.0;
#pragma omp simd reduction(+ : total)
    for (std::size_t i = 0; i < acc.n; ++i) {
        const double lam = 0.5 * (T[i] + std::sqrt(T[i] * T[i] - 4.0 * S[i]));
        total += std::exp(L[i] - shift + c * std::log(lam));
    }
    acc.sums[static_cast<std::size_t>(ctx.depth)] += total;
    acc.n = 0;
}

void descend(const Context& ctx, Accumulator& acc, int level, double pp, double p, double qp, double q, double det,
             double lsum)
{
    if (level >= ctx.depth_min && level >= 1 && level < ctx.depth) {
        acc.sums[static_cast<std::size_t>(level)] += node_term(ctx, level, pp, q, det, lsum);
    }
    const std::size_t k = ctx.value.size();
    if (level == ctx.depth - 1) {
        // Children are leaves: child matrix [[p, pp + a p], [q, qp + a q]].
        for (std::size_t i = 0; i < k; ++i) {
            if (acc.n == kBuffer) {
                flush(ctx, acc);
            }
            acc.lsum[acc.n] = lsum + ctx.ell[i];
            acc.tau[acc.n] = p + qp + ctx.value[i] * q;
            acc.det[acc.n] = -det;
            ++acc.n;
        }
        return;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const double a = ctx.value[i];
        descend(ctx, acc, level + 1, p, pp + a * p, q, qp + a * q, -det, lsum + ctx.ell[i]);
    }
}

struct Prefix {
    double pp, p, qp, q, det, lsum;
};

} // namespace

PressureSums pressure_sums(const LinearForm& form, const std::vector<Digit>& digits, int depth, int depth_min,
                           const Limits& limits)
{
    if (depth < 1) {
        throw DomainError("pressure enumeration needs depth >= 1");
    }
    depth_min = std::clamp(depth_min, 1, depth);
    Context ctx;
    ctx.depth = depth;
    ctx.depth_min = depth_min;
    ctx.c = -2.0 * form.t;
    Digit amax = 1;
    for (Digit d : digits) {
        const double e = form.has_digit_term() ? form.digit_term(d) : 0.0;
        if (!std::isfinite(e)) {
            continue; // zero weight, contributes nothing
        }
        ctx.ell.push_back(e);
        ctx.value.push_back(static_cast<double>(d));
        amax = std::max(amax, d);
    }
    if (ctx.ell.empty()) {
        throw DomainError("every digit of the alphabet has zero weight");
    }
    const std::size_t k = ctx.ell.size();
    double words = 1.0;
    for (int i = 0; i < depth; ++i) {
        words *= static_cast<double>(k);
    }
    if (words > static_cast<double>(limits.budget)) {
        throw ResourceError("enumeration of " + std::to_string(k) + "^" + std::to_string(depth) +
                            " words exceeds the budget of " + std::to_string(limits.budget));
    }

    // Upper bound of every depth-m term, so exp never overflows.
    const double ell_max = *std::max_element(ctx.ell.begin(), ctx.ell.end());
    const double log_theta = std::log((1.0 + std::sqrt(5.0)) / 2.0);
    ctx.shift.resize(static_cast<std::size_t>(depth) + 1);
    for (int m = 0; m <= depth; ++m) {
        const double lam_part = ctx.c >= 0.0 ? ctx.c * (m * std::log(static_cast<double>(amax) + 1.0) + std::log(2.0))
                                             : ctx.c * m * log_theta;
        ctx.shift[static_cast<std::size_t>(m)] = m * ell_max + lam_part;
    }

    // Prefixes of length L, lexicographic; interior terms up to L are summed
    // here, serially and in order.
    int L = 0;
    std::size_t count = 1;
    while (L < depth - 1 && count < static_cast<std::size_t>(std::max(1, limits.partitions))) {
        count *= k;
        ++L;
    }
    Accumulator head(depth);
    std::vector<Prefix> level{{1.0, 0.0, 0.0, 1.0, 1.0, 0.0}};
    for (int m = 1; m <= L; ++m) {
        std::vector<Prefix> next;
        next.reserve(level.size() * k);
        for (const Prefix& x : level) {
            for (std::size_t i = 0; i < k; ++i) {
                const double a = ctx.value[i];
                Prefix c{x.p, x.pp + a * x.p, x.q, x.qp + a * x.q, -x.det, x.lsum + ctx.ell[i]};
                if (m >= depth_min && m < depth) {
                    head.sums[static_cast<std::size_t>(m)] += node_term(ctx, m, c.pp, c.q, c.det, c.lsum);
                }
                next.push_back(c);
            }
        }
        level = std::move(next);
    }

    std::vector<std::vector<double>> partial(level.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(level.size()); ++i) {
        auto acc = std::make_unique<Accumulator>(depth);
        const Prefix& x = level[static_cast<std::size_t>(i)];
        // The prefix node's own interior term was added in the serial pass.
        if (L == depth - 1) {
            for (std::size_t j = 0; j < k; ++j) {
                if (acc->n == kBuffer) {
                    flush(ctx, *acc);
                }
                acc->lsum[acc->n] = x.lsum + ctx.ell[j];
                acc->tau[acc->n] = x.p + x.qp + ctx.value[j] * x.q;
                acc->det[acc->n] = -x.det;
                ++acc->n;
            }
        } else {
            for (std::size_t j = 0; j < k; ++j) {
                const double a = ctx.value[j];
                descend(ctx, *acc, L + 1, x.p, x.pp + a * x.p, x.q, x.qp + a * x.q, -x.det, x.lsum + ctx.ell[j]);
            }
        }
        flush(ctx, *acc);
        partial[static_cast<std::size_t>(i)] = std::move(acc->sums);
    }

    PressureSums out;
    out.depth_min = depth_min;
    out.words = static_cast<std::uint64_t>(words);
    for (int m = depth_min; m <= depth; ++m) {
        double s = head.sums[static_cast<std::size_t>(m)];
        for (const auto& p : partial) {
            s += p[static_cast<std::size_t>(m)];
        }
        out.shifts.push_back(ctx.shift[static_cast<std::size_t>(m)]);
        out.scaled_sums.push_back(s);
    }
    return out;
}

} // namespace gaussline
