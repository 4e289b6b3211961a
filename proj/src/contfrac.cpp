#include "gaussline/contfrac.hpp"
#include "gaussline/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace gaussline {

namespace mp = boost::multiprecision;

Word::Word(std::initializer_list<Digit> digits) : Word(std::vector<Digit>(digits)) {}

Word::Word(std::vector<Digit> digits) : digits_(std::move(digits))
{
    for (Digit d : digits_) {
        if (d < 1) {
            throw DomainError("continued-fraction digits must be >= 1");
        }
    }
}

void Word::push_back(Digit d)
{
    if (d < 1) {
        throw DomainError("continued-fraction digits must be >= 1");
    }
    digits_.push_back(d);
}

Word Word::prefix(std::size_t k) const
{
    if (k > digits_.size()) {
        throw DomainError("prefix longer than word");
    }
    return Word(std::vector<Digit>(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(k)));
}

Word Word::suffix_from(std::size_t start) const
{
    if (start > digits_.size()) {
        throw DomainError("suffix start past end of word");
    }
    return Word(std::vector<Digit>(digits_.begin() + static_cast<std::ptrdiff_t>(start), digits_.end()));
}

Word Word::operator+(const Word& tail) const
{
    std::vector<Digit> out = digits_;
    out.insert(out.end(), tail.digits_.begin(), tail.digits_.end());
    Word w;
    w.digits_ = std::move(out);
    return w;
}

std::string to_string(const Word& w)
{
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += std::to_string(w[i]);
    }
    return out;
}

Word parse_word(const std::string& text)
{
    std::vector<Digit> digits;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        Digit d = 0;
        const auto* first = item.data();
        const auto* last = item.data() + item.size();
        auto [ptr, ec] = std::from_chars(first, last, d);
        if (item.empty() || ec != std::errc() || ptr != last || d < 1) {
            throw DomainError("invalid digit '" + item + "' (digits are integers >= 1)");
        }
        digits.push_back(d);
    }
    if (digits.empty()) {
        throw DomainError("empty word");
    }
    return Word(std::move(digits));
}

GoldenConstants golden_constants()
{
    const double theta = (1.0 + std::sqrt(5.0)) / 2.0;
    return {theta, 1.0 / theta};
}

ConvergentQuad continuants(const Word& w)
{
    if (w.empty()) {
        throw DomainError("empty word has no continuant");
    }
    // p_{-1} = 1, q_{-1} = 0, p_0 = 0, q_0 = 1
    ConvergentQuad c{1, 0, 0, 1};
    for (Digit a : w) {
        BigInt p_next = c.p * a + c.p_prev;
        BigInt q_next = c.q * a + c.q_prev;
        c.p_prev = std::move(c.p);
        c.q_prev = std::move(c.q);
        c.p = std::move(p_next);
        c.q = std::move(q_next);
    }
    return c;
}

double log_continuant(const Word& w)
{
    if (w.empty()) {
        throw DomainError("empty word has no continuant");
    }
    // q_k / q_{k-1} = a_k + r_{k-1} with r_k = q_{k-1}/q_k, r_0 = 0.
    double r = 0.0;
    double sum = 0.0;
    for (Digit a : w) {
        const double step = static_cast<double>(a) + r;
        sum += std::log(step);
        r = 1.0 / step;
    }
    return sum;
}

Word mirror(const Word& w)
{
    return Word(std::vector<Digit>(w.digits().rbegin(), w.digits().rend()));
}

Rational value_of(const Word& w)
{
    const ConvergentQuad c = continuants(w);
    return Rational(c.p, c.q);
}

CylinderInterval cylinder(const Word& w)
{
    const ConvergentQuad c = continuants(w);
    Rational a(c.p, c.q);
    Rational b(c.p + c.p_prev, c.q + c.q_prev);
    const int orientation = (w.size() % 2 == 0) ? 1 : -1;
    if (a < b) {
        return {std::move(a), std::move(b), orientation};
    }
    return {std::move(b), std::move(a), orientation};
}

namespace {

void require_unit(double x, const char* what)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw RangeError(std::string(what) + ": x must lie in [0,1]");
    }
}

} // namespace

double inverse_branch(const Word& w, double x)
{
    require_unit(x, "inverse_branch");
    if (w.empty()) {
        return x;
    }
    // [a_1, ..., a_n + x] evaluated from the inside out; no overflow for long words.
    double y = x;
    for (auto it = w.digits().rbegin(); it != w.digits().rend(); ++it) {
        y = 1.0 / (static_cast<double>(*it) + y);
    }
    return y;
}

double inverse_branch_derivative(const Word& w, double x)
{
    require_unit(x, "inverse_branch_derivative");
    if (w.empty()) {
        return 1.0;
    }
    // (-1)^n / (q_prev x + q)^2 = (-1)^n * prod_k y_k^2 with y_k the nested tails.
    double y = x;
    double log_mag = 0.0;
    for (auto it = w.digits().rbegin(); it != w.digits().rend(); ++it) {
        y = 1.0 / (static_cast<double>(*it) + y);
        log_mag += 2.0 * std::log(y);
    }
    const double mag = std::exp(log_mag);
    return (w.size() % 2 == 0) ? mag : -mag;
}

GaussStep gauss_step(double x)
{
    if (!(x > 0.0 && x < 1.0)) {
        throw RangeError("gauss_step: x must lie in (0,1)");
    }
    const double y = 1.0 / x;
    const double f = std::floor(y);
    if (f >= static_cast<double>(std::numeric_limits<Digit>::max())) {
        throw RangeError("gauss_step: digit exceeds 64-bit range");
    }
    return {static_cast<Digit>(f), y - f};
}

ExactGaussStep gauss_step(const Rational& x)
{
    if (!(x > 0 && x < 1)) {
        throw RangeError("gauss_step: x must lie in (0,1)");
    }
    const BigInt& num = mp::numerator(x);
    const BigInt& den = mp::denominator(x);
    const BigInt a = den / num;
    return {a.convert_to<Digit>(), Rational(den - a * num, num)};
}

Word cf_digits(double x, std::size_t max_n)
{
    if (max_n < 1) {
        throw DomainError("cf_digits: max_n must be >= 1");
    }
    if (!(x > 0.0 && x < 1.0)) {
        throw RangeError("cf_digits: x must lie in (0,1)");
    }
    Word out;
    double q_prev = 0.0;
    double q = 1.0;
    double r = x;
    const double eps = std::ldexp(1.0, -52);
    while (out.size() < max_n) {
        const GaussStep step = gauss_step(r);
        out.push_back(step.digit);
        const double q_next = static_cast<double>(step.digit) * q + q_prev;
        q_prev = q;
        q = q_next;
        r = step.remainder;
        // Below this the remaining digits are rounding noise.
        if (!(r > eps * q * q) || r >= 1.0) {
            break;
        }
    }
    return out;
}

Word cf_digits(const Rational& x, std::size_t max_n)
{
    if (max_n < 1) {
        throw DomainError("cf_digits: max_n must be >= 1");
    }
    if (!(x > 0 && x < 1)) {
        throw RangeError("cf_digits: x must lie in (0,1)");
    }
    Word out;
    BigInt num = mp::numerator(x);
    BigInt den = mp::denominator(x);
    while (out.size() < max_n && num != 0) {
        BigInt a = den / num;
        BigInt rem = den - a * num;
        out.push_back(a.convert_to<Digit>());
        den = std::move(num);
        num = std::move(rem);
    }
    return out;
}

double quasi_independence_ratio(const Word& w, std::size_t j)
{
    const std::size_t n = w.size();
    if (j < 1 || j >= n) {
        throw DomainError("quasi_independence_ratio: need 1 <= j < n");
    }
    const BigInt q = continuants(w).q;
    const BigInt left = continuants(w.prefix(n - j)).q;
    const BigInt right = continuants(w.suffix_from(n - j)).q;
    return ratio_to_double(q, left * right);
}

Branch branch_of(const Word& w)
{
    Branch b;
    for (Digit a : w) {
        b = b.child(a);
    }
    return b;
}

} // namespace gaussline
