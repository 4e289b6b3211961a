#include "gaussline/digit_law.hpp"
#include "gaussline/errors.hpp"

#include <cmath>
#include <numeric>

namespace gaussline {

double hurwitz_zeta(double s, double n)
{
    if (!(s > 1.0) || !(n >= 1.0)) {
        throw DomainError("hurwitz_zeta: need s > 1 and n >= 1");
    }
    constexpr int kDirect = 16;
    double sum = 0.0;
    for (int k = 0; k < kDirect; ++k) {
        sum += std::pow(n + k, -s);
    }
    const double N = n + kDirect;
    const double Ns = std::pow(N, -s);
    sum += N * Ns / (s - 1.0) + 0.5 * Ns;
    // Bernoulli corrections B2/2!, B4/4!, B6/6!
    double factor = s * Ns / N;
    sum += factor / 12.0;
    factor *= (s + 1.0) * (s + 2.0) / (N * N);
    sum -= factor / 720.0;
    factor *= (s + 3.0) * (s + 4.0) / (N * N);
    sum += factor / 30240.0;
    return sum;
}

DigitLaw::DigitLaw(std::vector<double> explicit_probs, std::optional<DigitTail> tail)
    : probs_(std::move(explicit_probs)), tail_(tail)
{
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw DomainError("digit probabilities must be finite and nonnegative");
        }
    }
    if (tail_) {
        const DigitTail& t = *tail_;
        if (!(t.scale >= 0.0)) {
            throw DomainError("tail scale must be nonnegative");
        }
        if (t.kind == DigitTail::Kind::Geometric && !(t.ratio > 0.0 && t.ratio < 1.0)) {
            throw DomainError("geometric tail ratio must lie in (0,1)");
        }
        if (t.kind == DigitTail::Kind::Power && !(t.exponent > 1.0)) {
            throw DomainError("power tail exponent must exceed 1");
        }
    }
    if (probs_.empty() && !tail_) {
        throw DomainError("digit law has no support");
    }
    suffix_.assign(probs_.size() + 1, 0.0);
    for (std::size_t i = probs_.size(); i-- > 0;) {
        suffix_[i] = suffix_[i + 1] + probs_[i];
    }
    if (total() > 1.0 + 1e-12) {
        throw DomainError("digit probabilities sum to more than 1");
    }
}

DigitLaw DigitLaw::minkowski()
{
    return DigitLaw({}, DigitTail{DigitTail::Kind::Geometric, 1.0, 0.5, 0.0});
}

DigitLaw DigitLaw::geometric(double r)
{
    if (!(r > 0.0 && r < 1.0)) {
        throw DomainError("geometric ratio must lie in (0,1)");
    }
    return DigitLaw({}, DigitTail{DigitTail::Kind::Geometric, (1.0 - r) / r, r, 0.0});
}

DigitLaw DigitLaw::power(double kappa)
{
    if (!(kappa > 1.0)) {
        throw DomainError("power-law exponent must exceed 1");
    }
    return DigitLaw({}, DigitTail{DigitTail::Kind::Power, 1.0 / hurwitz_zeta(kappa, 1.0), 0.0, kappa});
}

double DigitLaw::prob(Digit a) const
{
    if (a < 1) {
        return 0.0;
    }
    if (a <= probs_.size()) {
        return probs_[a - 1];
    }
    if (!tail_) {
        return 0.0;
    }
    const double x = static_cast<double>(a);
    if (tail_->kind == DigitTail::Kind::Geometric) {
        return tail_->scale * std::pow(tail_->ratio, x);
    }
    return tail_->scale * std::pow(x, -tail_->exponent);
}

double DigitLaw::log_prob(Digit a) const
{
    if (a > probs_.size() && tail_) {
        const double x = static_cast<double>(a);
        if (tail_->kind == DigitTail::Kind::Geometric) {
            return std::log(tail_->scale) + x * std::log(tail_->ratio);
        }
        return std::log(tail_->scale) - tail_->exponent * std::log(x);
    }
    return std::log(prob(a));
}

double DigitLaw::tail_sum(Digit a) const
{
    if (!tail_) {
        return 0.0;
    }
    const double x = static_cast<double>(a);
    if (tail_->kind == DigitTail::Kind::Geometric) {
        return tail_->scale * std::pow(tail_->ratio, x) / (1.0 - tail_->ratio);
    }
    return tail_->scale * hurwitz_zeta(tail_->exponent, x);
}

double DigitLaw::tail_from(Digit a) const
{
    if (a < 1) {
        a = 1;
    }
    const std::size_t K = probs_.size();
    if (a > K) {
        return tail_sum(a);
    }
    return suffix_[a - 1] + tail_sum(static_cast<Digit>(K + 1));
}

Digit DigitLaw::max_digit() const
{
    if (tail_) {
        return std::numeric_limits<Digit>::max();
    }
    std::size_t k = probs_.size();
    while (k > 0 && probs_[k - 1] == 0.0) {
        --k;
    }
    return static_cast<Digit>(k);
}

Digit DigitLaw::inverse_cdf(double u) const
{
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        if (u <= acc && probs_[i] > 0.0) {
            return static_cast<Digit>(i + 1);
        }
    }
    if (!tail_) {
        return max_digit();
    }
    const Digit K = static_cast<Digit>(probs_.size());
    // Remaining target measured from the far end: find the first a > K with
    // tail_from(a + 1) < total - u.
    const double remaining = total() - u;
    if (tail_->kind == DigitTail::Kind::Geometric) {
        // tail_sum(a) = c r^a with c = scale / (1 - r)
        const double c = tail_->scale / (1.0 - tail_->ratio);
        if (remaining <= 0.0) {
            return K + 1;
        }
        double a = std::floor(std::log(remaining / c) / std::log(tail_->ratio));
        Digit d = a < static_cast<double>(K + 1) ? K + 1 : static_cast<Digit>(a);
        while (d > K + 1 && tail_sum(d) <= remaining) {
            --d;
        }
        while (tail_sum(d + 1) > remaining) {
            ++d;
        }
        return d;
    }
    Digit d = K + 1;
    if (remaining <= 0.0) {
        return d;
    }
    // Power tail: start from the asymptotic inverse and correct locally.
    const double kappa = tail_->exponent;
    const double guess = std::pow(remaining * (kappa - 1.0) / tail_->scale, -1.0 / (kappa - 1.0));
    if (guess > static_cast<double>(K + 1) && guess < 1e18) {
        d = static_cast<Digit>(guess);
    }
    while (d > K + 1 && tail_sum(d) <= remaining) {
        --d;
    }
    while (tail_sum(d + 1) > remaining) {
        ++d;
    }
    return d;
}

double DigitLaw::entropy_upto(Digit a_max) const
{
    double h = 0.0;
    for (Digit a = 1; a <= a_max; ++a) {
        const double p = prob(a);
        if (p > 0.0) {
            h -= p * log_prob(a);
        }
        if (a == std::numeric_limits<Digit>::max()) {
            break;
        }
    }
    return h;
}

double DigitLaw::entropy() const
{
    const std::size_t K = probs_.size();
    double h = entropy_upto(static_cast<Digit>(K));
    if (!tail_) {
        return h;
    }
    const DigitTail& t = *tail_;
    if (t.kind == DigitTail::Kind::Geometric) {
        // -sum_{a > K} c r^a (log c + a log r), closed form.
        const double r = t.ratio;
        const double c = t.scale;
        const double x0 = static_cast<double>(K + 1);
        const double mass = c * std::pow(r, x0) / (1.0 - r);
        // sum_{a >= x0} a r^a = r^x0 (x0 (1-r) + r) / (1-r)^2
        const double first_moment = c * std::pow(r, x0) * (x0 * (1.0 - r) + r) / ((1.0 - r) * (1.0 - r));
        return h - mass * std::log(c) - first_moment * std::log(r);
    }
    // Power tail: sum directly until the remainder is negligible, then bound
    // the rest with the Euler-Maclaurin integral of a^-k log a.
    const double kappa = t.exponent;
    Digit a = static_cast<Digit>(K + 1);
    const Digit stop = a + 200000;
    for (; a < stop; ++a) {
        const double p = prob(a);
        h -= p * log_prob(a);
    }
    const double A = static_cast<double>(stop) - 0.5;
    // integral_A^inf c x^-k (k log x - log c) dx
    const double c = t.scale;
    const double I1 = std::pow(A, 1.0 - kappa) * (std::log(A) / (kappa - 1.0) + 1.0 / ((kappa - 1.0) * (kappa - 1.0)));
    const double I0 = std::pow(A, 1.0 - kappa) / (kappa - 1.0);
    h += c * (kappa * I1 - std::log(c) * I0);
    return h;
}

} // namespace gaussline
