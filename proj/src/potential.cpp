#include "gaussline/potential.hpp"
#include "gaussline/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gaussline {

Alphabet Alphabet::finite(std::vector<Digit> digits)
{
    std::sort(digits.begin(), digits.end());
    digits.erase(std::unique(digits.begin(), digits.end()), digits.end());
    if (digits.empty()) {
        throw DomainError("alphabet must be nonempty");
    }
    if (digits.front() < 1) {
        throw DomainError("alphabet digits must be >= 1");
    }
    Alphabet a;
    a.kind_ = Kind::Finite;
    a.digits_ = std::move(digits);
    return a;
}

Alphabet Alphabet::first_n(Digit n)
{
    std::vector<Digit> d;
    for (Digit k = 1; k <= n; ++k) {
        d.push_back(k);
    }
    return finite(std::move(d));
}

Alphabet Alphabet::truncated(Digit a_max, double tail_bound)
{
    if (a_max < 2) {
        throw DomainError("truncated alphabet needs a_max >= 2");
    }
    if (!(tail_bound >= 0.0)) {
        throw DomainError("tail bound must be nonnegative");
    }
    Alphabet a = first_n(a_max);
    a.kind_ = Kind::TruncatedNaturals;
    a.tail_bound_ = tail_bound;
    return a;
}

bool Alphabet::contains(Digit d) const
{
    return std::binary_search(digits_.begin(), digits_.end(), d);
}

Alphabet parse_alphabet(const std::string& text)
{
    if (text.empty()) {
        throw DomainError("empty alphabet");
    }
    // "1..N" shorthand as well as explicit lists
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const Word lo = parse_word(text.substr(0, dots));
        const Word hi = parse_word(text.substr(dots + 2));
        if (lo.size() != 1 || hi.size() != 1 || hi[0] < lo[0]) {
            throw DomainError("malformed alphabet range '" + text + "'");
        }
        std::vector<Digit> d;
        for (Digit k = lo[0]; k <= hi[0]; ++k) {
            d.push_back(k);
        }
        return Alphabet::finite(std::move(d));
    }
    return Alphabet::finite(parse_word(text).digits());
}

double Potential::operator()(double x) const
{
    if (!(x > 0.0 && x < 1.0)) {
        throw RangeError("potential evaluated outside (0,1)");
    }
    const LinearForm form = linearize(*this);
    double v = 2.0 * form.t * std::log(x);
    if (form.has_digit_term()) {
        v += form.digit_term(gauss_step(x).digit);
    }
    return v;
}

double LinearForm::digit_term(Digit a) const
{
    double v = 0.0;
    for (const auto& [c, law] : laws) {
        if (c != 0.0) {
            v += c * law.log_prob(a);
        }
    }
    return v;
}

namespace {

void accumulate(const Potential& phi, double scale, LinearForm& out)
{
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, BernoulliLog>) {
                out.laws.emplace_back(scale, k.law);
            } else if constexpr (std::is_same_v<K, TLogDeriv>) {
                out.t += scale * k.t;
            } else {
                for (const ComboTerm& term : k.terms) {
                    accumulate(term.potential, scale * term.coefficient, out);
                }
            }
        },
        phi.kind());
}

} // namespace

LinearForm linearize(const Potential& phi)
{
    LinearForm form;
    accumulate(phi, 1.0, form);
    return form;
}

double birkhoff_sum(const LinearForm& form, const Word& w, double x)
{
    if (w.empty()) {
        throw DomainError("birkhoff_sum needs a nonempty word");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw RangeError("birkhoff_sum: x must lie in [0,1]");
    }
    double s = 0.0;
    if (form.has_digit_term()) {
        for (Digit a : w) {
            s += form.digit_term(a);
        }
    }
    if (form.t != 0.0) {
        // log|T_w'(x)| = -2 log(q_prev x + q) = -2 (log q + log1p(x q_prev / q))
        double r = 0.0;
        double log_q = 0.0;
        for (Digit a : w) {
            const double step = static_cast<double>(a) + r;
            log_q += std::log(step);
            r = 1.0 / step;
        }
        s += form.t * (-2.0) * (log_q + std::log1p(x * r));
    }
    return s;
}

double birkhoff_sum(const Potential& phi, const Word& w, double x)
{
    return birkhoff_sum(linearize(phi), w, x);
}

} // namespace gaussline
