#pragma once

// Adaptive integration of a function against a measure model by refining
// continued-fraction cylinders.  Each leaf cylinder contributes
// mass * f(midpoint) and mass * min(cap, osc(I)) to the error, where osc
// bounds the variation of f over I.  Digits past the point where the rest
// of a node would already be a leaf are lumped into a single interval.
//
// The parallel path first expands the tree breadth-first into a frontier of
// at least `partitions` subtrees, integrates those under OpenMP and adds the
// partial sums in frontier order, so results do not depend on the number of
// threads.  integrate_serial is the plain depth-first reference.

#include "gaussline/contfrac.hpp"
#include "gaussline/errors.hpp"
#include "gaussline/measure.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <vector>

namespace gaussline {

struct QuadOptions {
    double leaf_osc = 1e-6;        // refine until osc(I) <= leaf_osc
    double mass_floor = 0.0;       // ... or mass < mass_floor
    int max_depth = 400;           // ... or this depth is reached
    double osc_cap = std::numeric_limits<double>::infinity();
    std::uint64_t max_leaves = std::uint64_t{1} << 30;
    int partitions = 64;
};

template <class V>
struct QuadResult {
    V value{};
    double error = 0.0;
    std::uint64_t leaves = 0;
    int deepest = 0;
};

namespace detail {

struct QuadNode {
    Branch branch;
    double mass;
};

template <class V, class F, class Osc>
class QuadWorker {
public:
    QuadWorker(const MassRule& rule, const F& f, const Osc& osc, const QuadOptions& opt,
               std::atomic<std::uint64_t>& shared_leaves)
        : rule_(rule), f_(f), osc_(osc), opt_(opt), shared_(shared_leaves)
    {
    }

    QuadResult<V> result;

    // Adds the contribution of the interval [lo, hi] carrying `mass`.
    void leaf(double lo, double hi, double mass, int depth)
    {
        result.value += mass * f_(0.5 * (lo + hi));
        result.error += mass * std::min(opt_.osc_cap, osc_(lo, hi));
        result.deepest = std::max(result.deepest, depth);
        if ((++result.leaves & 0xfff) == 0) {
            if (shared_.fetch_add(0x1000, std::memory_order_relaxed) + 0x1000 > opt_.max_leaves) {
                throw ResourceError("cylinder quadrature exceeded " + std::to_string(opt_.max_leaves) +
                                    " leaves (depth reached " + std::to_string(result.deepest) + ")");
            }
        }
    }

    bool is_leaf(const QuadNode& n) const
    {
        return n.mass <= 0.0 || n.mass < opt_.mass_floor || n.branch.depth >= opt_.max_depth ||
               osc_(n.branch.low(), n.branch.high()) <= opt_.leaf_osc;
    }

    // Expands one node, handing each child either to `leaf` or to `push`.
    template <class Push>
    void expand(const QuadNode& n, Push&& push)
    {
        const Branch& b = n.branch;
        if (rule_.finite()) {
            rule_.children(b, n.mass, masses_);
            const auto& digits = rule_.digits();
            for (std::size_t i = 0; i < digits.size(); ++i) {
                visit_child({b.child(digits[i]), masses_[i]}, push);
            }
            truncated_ += untracked(n, masses_);
            return;
        }
        for (Digit d = 1;; ++d) {
            if (d > 1) {
                // Lump every digit >= d into T_b((0, 1/d]).
                const double lump = rule_.tail(b, n.mass, d);
                const double D = static_cast<double>(d);
                const double e0 = b.p / b.q;
                const double e1 = (b.p_prev + D * b.p) / (b.q_prev + D * b.q);
                const double lo = std::min(e0, e1);
                const double hi = std::max(e0, e1);
                if (d > rule_.last_digit() || lump < opt_.mass_floor || osc_(lo, hi) <= opt_.leaf_osc) {
                    if (lump > 0.0) {
                        leaf(lo, hi, lump, b.depth + 1);
                    }
                    break;
                }
            }
            const double m = rule_.child(b, n.mass, d);
            visit_child({b.child(d), m}, push);
        }
    }

    double truncated() const { return truncated_; }

private:
    template <class Push>
    void visit_child(QuadNode c, Push& push)
    {
        if (is_leaf(c)) {
            if (c.mass > 0.0) {
                leaf(c.branch.low(), c.branch.high(), c.mass, c.branch.depth);
            }
        } else {
            push(c);
        }
    }

    double untracked(const QuadNode& n, const std::vector<double>& masses) const
    {
        double s = 0.0;
        for (double m : masses) {
            s += m;
        }
        const double gap = n.mass - s;
        return gap > 0.0 ? gap : 0.0;
    }

    const MassRule& rule_;
    const F& f_;
    const Osc& osc_;
    const QuadOptions& opt_;
    std::atomic<std::uint64_t>& shared_;
    std::vector<double> masses_;
    double truncated_ = 0.0;
};

template <class V, class F, class Osc>
void integrate_subtree(QuadWorker<V, F, Osc>& w, const QuadNode& root)
{
    std::vector<QuadNode> stack{root};
    while (!stack.empty()) {
        const QuadNode n = stack.back();
        stack.pop_back();
        // Children are pushed in digit order and popped in reverse; the
        // order is fixed, which is all determinism needs.
        w.expand(n, [&](const QuadNode& c) { stack.push_back(c); });
    }
}

} // namespace detail

// Truncation below 1e-15 relative mass is rounding noise from the child
// mass formulas; larger gaps come from truncated digit laws.
template <class V, class F, class Osc>
QuadResult<V> integrate_serial(const MeasureModel& model, const F& f, const Osc& osc, const QuadOptions& opt)
{
    const MassRule rule(model);
    std::atomic<std::uint64_t> shared{0};
    detail::QuadWorker<V, F, Osc> w(rule, f, osc, opt, shared);
    const detail::QuadNode root{Branch{}, 1.0};
    if (w.is_leaf(root)) {
        w.leaf(0.0, 1.0, 1.0, 0);
    } else {
        detail::integrate_subtree(w, root);
    }
    QuadResult<V> r = w.result;
    if (w.truncated() > 1e-15) {
        r.error += w.truncated();
    }
    return r;
}

template <class V, class F, class Osc>
QuadResult<V> integrate_parallel(const MeasureModel& model, const F& f, const Osc& osc, const QuadOptions& opt)
{
    const MassRule rule(model);
    std::atomic<std::uint64_t> shared{0};
    detail::QuadWorker<V, F, Osc> head(rule, f, osc, opt, shared);
    const detail::QuadNode root{Branch{}, 1.0};
    if (head.is_leaf(root)) {
        head.leaf(0.0, 1.0, 1.0, 0);
        return head.result;
    }
    // Breadth-first expansion into a frontier of independent subtrees.
    std::deque<detail::QuadNode> frontier{root};
    const std::size_t target = static_cast<std::size_t>(std::max(1, opt.partitions));
    while (!frontier.empty() && frontier.size() < target) {
        const detail::QuadNode n = frontier.front();
        frontier.pop_front();
        head.expand(n, [&](const detail::QuadNode& c) { frontier.push_back(c); });
    }
    const std::vector<detail::QuadNode> parts(frontier.begin(), frontier.end());
    std::vector<QuadResult<V>> partial(parts.size());
    std::vector<double> truncated(parts.size(), 0.0);
    std::string failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(parts.size()); ++i) {
        try {
            detail::QuadWorker<V, F, Osc> w(rule, f, osc, opt, shared);
            detail::integrate_subtree(w, parts[static_cast<std::size_t>(i)]);
            partial[static_cast<std::size_t>(i)] = w.result;
            truncated[static_cast<std::size_t>(i)] = w.truncated();
        } catch (const std::exception& e) {
#pragma omp critical(gaussline_quadrature_failure)
            if (failure.empty()) {
                failure = e.what();
            }
        }
    }
    if (!failure.empty()) {
        throw ResourceError(failure);
    }
    QuadResult<V> r = head.result;
    double lost = head.truncated();
    for (std::size_t i = 0; i < parts.size(); ++i) {
        r.value += partial[i].value;
        r.error += partial[i].error;
        r.leaves += partial[i].leaves;
        r.deepest = std::max(r.deepest, partial[i].deepest);
        lost += truncated[i];
    }
    if (lost > 1e-15) {
        r.error += lost;
    }
    return r;
}

} // namespace gaussline
