#include "gaussline/measure.hpp"
#include "gaussline/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gaussline {

namespace mp = boost::multiprecision;

namespace {

template <class... F>
struct overloaded : F... {
    using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

const double kLog2 = std::log(2.0);

double gauss_interval_mass(double low, double length)
{
    return std::log1p(length / (1.0 + low)) / kLog2;
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, sep)) {
        out.push_back(item);
    }
    return out;
}

double parse_real(const std::string& text)
{
    if (text.find('/') != std::string::npos) {
        return to_double(parse_rational(text));
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw DomainError("malformed number '" + text + "'");
    }
    if (used != text.size()) {
        throw DomainError("malformed number '" + text + "'");
    }
    return v;
}

} // namespace

MeasureModel MeasureModel::minkowski()
{
    return MeasureModel(BernoulliModel{DigitLaw::minkowski(), std::nullopt}, "minkowski");
}

MeasureModel MeasureModel::lebesgue()
{
    return MeasureModel(LebesgueModel{}, "lebesgue");
}

MeasureModel MeasureModel::gauss()
{
    return MeasureModel(GaussModel{}, "gauss");
}

MeasureModel MeasureModel::bernoulli(DigitLaw law, std::optional<Digit> truncate_at)
{
    if (truncate_at && *truncate_at < 1) {
        throw DomainError("truncation digit must be >= 1");
    }
    return MeasureModel(BernoulliModel{std::move(law), truncate_at}, "bernoulli");
}

MeasureModel MeasureModel::bernoulli(std::vector<double> probs)
{
    double total = 0.0;
    for (double p : probs) {
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw DomainError("bernoulli weights must sum to 1");
    }
    return bernoulli(DigitLaw(std::move(probs)));
}

MeasureModel MeasureModel::finite_potential(Potential phi, Alphabet alphabet, int probe_depth)
{
    if (alphabet.kind() != Alphabet::Kind::Finite) {
        throw DomainError("potential models need a finite alphabet");
    }
    FinitePotentialModel m{phi, alphabet, 1.0, linearize(phi)};
    // Distortion of w_a over the cylinder: w_a(x)/w_a(y) for x, y in [0,1].
    // With the linear form only the t log|T_a'| part depends on x, and it is
    // monotone in x, so the endpoints give the extremes.
    const auto& digits = alphabet.digits();
    const std::size_t k = digits.size();
    std::uint64_t count = 1;
    int depth = 0;
    while (depth < probe_depth && count * k <= (std::uint64_t{1} << 16)) {
        count *= k;
        ++depth;
    }
    double worst = 0.0;
    std::vector<std::size_t> idx(static_cast<std::size_t>(depth), 0);
    for (std::uint64_t i = 0; i < count; ++i) {
        Branch b;
        for (std::size_t j : idx) {
            b = b.child(digits[j]);
        }
        const double spread = std::abs(m.form.t) * std::abs(b.log_derivative(0.0) - b.log_derivative(1.0));
        worst = std::max(worst, spread);
        for (std::size_t j = idx.size(); j-- > 0;) {
            if (++idx[j] < k) {
                break;
            }
            idx[j] = 0;
        }
    }
    m.gibbs_constant = std::exp(worst);
    return MeasureModel(std::move(m), "potential");
}

bool MeasureModel::is_minkowski() const
{
    const auto* b = std::get_if<BernoulliModel>(&kind_);
    if (!b || b->truncate_at) {
        return false;
    }
    const DigitLaw& law = b->law;
    const auto& tail = law.tail();
    if (!tail || tail->kind != DigitTail::Kind::Geometric || tail->ratio != 0.5) {
        return false;
    }
    for (std::size_t a = 1; a <= law.explicit_size() + 2; ++a) {
        if (law.prob(a) != std::ldexp(1.0, -static_cast<int>(a))) {
            return false;
        }
    }
    return true;
}

bool MeasureModel::finite_support() const
{
    return std::visit(overloaded{
                          [](const BernoulliModel& b) { return b.law.finite_support() || b.truncate_at.has_value(); },
                          [](const FinitePotentialModel&) { return true; },
                          [](const auto&) { return false; },
                      },
                      kind_);
}

std::vector<Digit> MeasureModel::support() const
{
    return std::visit(overloaded{
                          [](const BernoulliModel& b) {
                              std::vector<Digit> out;
                              Digit top = b.law.max_digit();
                              if (b.truncate_at) {
                                  top = std::min(top, *b.truncate_at);
                              }
                              if (top == std::numeric_limits<Digit>::max()) {
                                  throw DomainError("model has infinite support");
                              }
                              for (Digit a = 1; a <= top; ++a) {
                                  if (b.law.prob(a) > 0.0) {
                                      out.push_back(a);
                                  }
                              }
                              return out;
                          },
                          [](const FinitePotentialModel& f) { return f.alphabet.digits(); },
                          [](const auto&) -> std::vector<Digit> { throw DomainError("model has infinite support"); },
                      },
                      kind_);
}

double MeasureModel::truncated_mass() const
{
    if (const auto* b = std::get_if<BernoulliModel>(&kind_); b && b->truncate_at) {
        return b->law.tail_from(*b->truncate_at + 1);
    }
    return 0.0;
}

MeasureModel parse_model(const std::string& spec)
{
    const auto parts = split(spec, ':');
    if (parts.empty()) {
        throw DomainError("empty model spec");
    }
    const std::string& head = parts[0];
    if (head == "minkowski" && parts.size() == 1) {
        return MeasureModel::minkowski();
    }
    if (head == "lebesgue" && parts.size() == 1) {
        return MeasureModel::lebesgue();
    }
    if (head == "gauss" && parts.size() == 1) {
        return MeasureModel::gauss();
    }
    if (head == "bernoulli" && parts.size() == 2) {
        std::vector<double> probs;
        for (const auto& item : split(parts[1], ',')) {
            probs.push_back(parse_real(item));
        }
        return MeasureModel::bernoulli(std::move(probs));
    }
    if (head == "bernoulli-tail" && parts.size() == 4) {
        const double param = parse_real(parts[2]);
        const Word amax = parse_word(parts[3]);
        if (amax.size() != 1) {
            throw DomainError("amax must be a single digit");
        }
        if (parts[1] == "geometric") {
            return MeasureModel::bernoulli(DigitLaw::geometric(param), amax[0]);
        }
        if (parts[1] == "power") {
            return MeasureModel::bernoulli(DigitLaw::power(param), amax[0]);
        }
    }
    if (head == "potential" && parts.size() == 4 && parts[1] == "tlog") {
        const double s = parse_real(parts[2]);
        return MeasureModel::finite_potential(Potential::tlog(s), parse_alphabet(parts[3]));
    }
    throw DomainError("unrecognised model spec '" + spec + "'");
}

double cylinder_mass(const MeasureModel& model, const Word& w)
{
    return std::visit(
        overloaded{
            [&](const BernoulliModel& b) {
                double m = 1.0;
                for (Digit a : w) {
                    if ((b.truncate_at && a > *b.truncate_at) || b.law.prob(a) == 0.0) {
                        if (a > b.law.max_digit() || (b.truncate_at && a > *b.truncate_at)) {
                            throw DomainError("digit " + std::to_string(a) + " outside the model's alphabet");
                        }
                        return 0.0;
                    }
                    m *= b.law.prob(a);
                }
                return m;
            },
            [&](const FinitePotentialModel& f) {
                for (Digit a : w) {
                    if (!f.alphabet.contains(a)) {
                        throw DomainError("digit " + std::to_string(a) + " outside the model's alphabet");
                    }
                }
                return std::exp(birkhoff_sum(f.form, w, kWeightPoint));
            },
            [&](const LebesgueModel&) {
                if (w.empty()) {
                    return 1.0;
                }
                return branch_of(w).length();
            },
            [&](const GaussModel&) {
                if (w.empty()) {
                    return 1.0;
                }
                const Branch b = branch_of(w);
                return gauss_interval_mass(b.low(), b.length());
            },
        },
        model.kind());
}

double tail_mass(const MeasureModel& model, Digit n)
{
    if (n < 1) {
        throw DomainError("tail_mass: n must be >= 1");
    }
    return std::visit(overloaded{
                          [&](const BernoulliModel& b) { return b.law.tail_from(n); },
                          [&](const FinitePotentialModel& f) {
                              double total = 0.0;
                              double tail = 0.0;
                              for (Digit a : f.alphabet.digits()) {
                                  const double w = std::exp(birkhoff_sum(f.form, Word{a}, kWeightPoint));
                                  total += w;
                                  if (a >= n) {
                                      tail += w;
                                  }
                              }
                              return tail / total;
                          },
                          [&](const LebesgueModel&) { return 1.0 / static_cast<double>(n); },
                          [&](const GaussModel&) { return std::log1p(1.0 / static_cast<double>(n)) / kLog2; },
                      },
                      model.kind());
}

// ---------------------------------------------------------------------------

MassRule::MassRule(const MeasureModel& model, bool cache_digits) : model_(&model), last_digit_(std::numeric_limits<Digit>::max())
{
    if (model.finite_support()) {
        finite_ = true;
        digits_ = model.support();
        last_digit_ = digits_.back();
    }
    const auto* m = std::get_if<BernoulliModel>(&model.kind());
    if (m && cache_digits) {
        // Per-digit factors for the quadrature's inner loop.
        const double cut = m->truncate_at ? m->law.tail_from(*m->truncate_at + 1) : 0.0;
        prob_.assign(kCachedDigits + 1, 0.0);
        tail_.assign(kCachedDigits + 2, 0.0);
        tail_[kCachedDigits + 1] = kCachedDigits + 1 > last_digit_ ? 0.0 : m->law.tail_from(kCachedDigits + 1) - cut;
        for (Digit d = kCachedDigits; d >= 1; --d) {
            prob_[d] = d > last_digit_ ? 0.0 : m->law.prob(d);
            tail_[d] = tail_[d + 1] + prob_[d];
        }
    }
}

double MassRule::child(const Branch& b, double mass, Digit d) const
{
    if (d <= kCachedDigits && !prob_.empty()) {
        return mass * prob_[d];
    }
    return std::visit(overloaded{
                          [&](const BernoulliModel& m) {
                              if (d > last_digit_) {
                                  return 0.0;
                              }
                              return mass * m.law.prob(d);
                          },
                          [&](const FinitePotentialModel&) {
                              std::vector<double> all;
                              children(b, mass, all);
                              const auto it = std::lower_bound(digits_.begin(), digits_.end(), d);
                              if (it == digits_.end() || *it != d) {
                                  return 0.0;
                              }
                              return all[static_cast<std::size_t>(it - digits_.begin())];
                          },
                          [&](const LebesgueModel&) { return b.child(d).length(); },
                          [&](const GaussModel&) {
                              const Branch c = b.child(d);
                              return gauss_interval_mass(c.low(), c.length());
                          },
                      },
                      model_->kind());
}

double MassRule::tail(const Branch& b, double mass, Digit d) const
{
    if (d <= 1) {
        return mass;
    }
    if (d <= kCachedDigits + 1 && !tail_.empty()) {
        return mass * tail_[d];
    }
    const double D = static_cast<double>(d);
    // I_b restricted to digits >= d is T_b((0, 1/d]); its length is 1/(q (q_prev + d q)).
    const double length = 1.0 / (b.q * (b.q_prev + D * b.q));
    return std::visit(overloaded{
                          [&](const BernoulliModel& m) {
                              if (d > last_digit_) {
                                  return 0.0;
                              }
                              double t = m.law.tail_from(d);
                              if (m.truncate_at) {
                                  t -= m.law.tail_from(*m.truncate_at + 1);
                              }
                              return mass * t;
                          },
                          [&](const FinitePotentialModel&) {
                              std::vector<double> all;
                              children(b, mass, all);
                              double t = 0.0;
                              for (std::size_t i = 0; i < digits_.size(); ++i) {
                                  if (digits_[i] >= d) {
                                      t += all[i];
                                  }
                              }
                              return t;
                          },
                          [&](const LebesgueModel&) { return length; },
                          [&](const GaussModel&) {
                              const double a = b.p / b.q;
                              const double c = (b.p_prev + D * b.p) / (b.q_prev + D * b.q);
                              return gauss_interval_mass(std::min(a, c), length);
                          },
                      },
                      model_->kind());
}

void MassRule::children(const Branch& b, double mass, std::vector<double>& out) const
{
    if (!finite_) {
        throw DomainError("children() needs a finitely supported model");
    }
    out.resize(digits_.size());
    if (const auto* f = std::get_if<FinitePotentialModel>(&model_->kind())) {
        // Conditional weights of the children at the pinning point.
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < digits_.size(); ++i) {
            const Branch c = b.child(digits_[i]);
            out[i] = f->form.digit_term(digits_[i]) + f->form.t * c.log_derivative(kWeightPoint);
            top = std::max(top, out[i]);
        }
        double total = 0.0;
        for (double& v : out) {
            v = std::exp(v - top);
            total += v;
        }
        for (double& v : out) {
            v *= mass / total;
        }
        return;
    }
    for (std::size_t i = 0; i < digits_.size(); ++i) {
        out[i] = child(b, mass, digits_[i]);
    }
}

// ---------------------------------------------------------------------------

DyadicRational::DyadicRational(BigInt num, std::uint64_t exp) : numerator(std::move(num)), exponent(exp)
{
    if (numerator < 0) {
        throw DomainError("dyadic value must be nonnegative");
    }
    if (numerator == 0) {
        exponent = 0;
        return;
    }
    const auto low = mp::lsb(numerator);
    const std::uint64_t strip = std::min<std::uint64_t>(low, exponent);
    numerator >>= static_cast<unsigned>(strip);
    exponent -= strip;
    if (numerator > (BigInt(1) << static_cast<unsigned>(exponent))) {
        throw DomainError("dyadic value must lie in [0,1]");
    }
}

Rational DyadicRational::value() const
{
    return Rational(numerator, BigInt(1) << static_cast<unsigned>(exponent));
}

double DyadicRational::to_double() const
{
    return ratio_to_double(numerator, BigInt(1) << static_cast<unsigned>(exponent));
}

std::string DyadicRational::str() const
{
    if (exponent == 0) {
        return numerator.str();
    }
    return numerator.str() + "/" + (BigInt(1) << static_cast<unsigned>(exponent)).str();
}

DyadicRational question_mark(const Word& w)
{
    if (w.empty()) {
        return DyadicRational(0, 0);
    }
    // 2 sum_k (-1)^(k+1) 2^-(a_1+...+a_k), over the common denominator 2^E.
    std::uint64_t E = 0;
    for (Digit a : w) {
        E += a;
    }
    BigInt num = 0;
    std::uint64_t partial = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        partial += w[k];
        const BigInt term = BigInt(1) << static_cast<unsigned>(E - partial + 1);
        if (k % 2 == 0) {
            num += term;
        } else {
            num -= term;
        }
    }
    return DyadicRational(std::move(num), E);
}

DyadicRational question_mark(const Rational& x)
{
    if (x < 0 || x > 1) {
        throw RangeError("question_mark: x must lie in [0,1]");
    }
    if (x == 0) {
        return DyadicRational(0, 0);
    }
    if (x == 1) {
        return DyadicRational(1, 0);
    }
    return question_mark(cf_digits(x, std::numeric_limits<std::size_t>::max()));
}

double question_mark_approx(double x, std::size_t max_digits)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw RangeError("question_mark_approx: x must lie in [0,1]");
    }
    if (x == 0.0 || x == 1.0) {
        return x;
    }
    return question_mark(cf_digits(exact_rational(x), max_digits)).to_double();
}

Word box_inverse(const Rational& t, std::size_t max_digits)
{
    if (!(t > 0 && t < 1)) {
        throw RangeError("box_inverse: t must lie in (0,1)");
    }
    if (max_digits < 1) {
        throw DomainError("box_inverse: max_digits must be >= 1");
    }
    // Binary digits of t, read as alternating runs of zeros and ones.
    BigInt num = mp::numerator(t);
    const BigInt den = mp::denominator(t);
    constexpr std::uint64_t kMaxBits = std::uint64_t{1} << 22;
    std::vector<Digit> runs;
    Digit current = 0;
    int expect = 0; // bit value of the current run
    std::uint64_t bits = 0;
    bool terminated = false;
    while (bits < kMaxBits) {
        if (num == 0) {
            terminated = true;
            break;
        }
        num <<= 1;
        int bit = 0;
        if (num >= den) {
            num -= den;
            bit = 1;
        }
        ++bits;
        if (bit == expect) {
            ++current;
        } else {
            runs.push_back(current);
            if (runs.size() >= max_digits) {
                break;
            }
            current = 1;
            expect = bit;
        }
    }
    if (terminated || (runs.size() < max_digits && current > 0)) {
        runs.push_back(current);
    }
    std::vector<Digit> digits;
    for (std::size_t k = 0; k < runs.size() && digits.size() < max_digits; ++k) {
        digits.push_back(k == 0 ? runs[0] + 1 : runs[k]);
    }
    // A terminating expansion ends in a run of ones read as (..., a, 1);
    // rewrite (..., a, 1) as the canonical (..., a + 1).
    if (terminated && digits.size() >= 2 && digits.back() == 1) {
        digits.pop_back();
        digits.back() += 1;
    }
    return Word(std::move(digits));
}

Word box_inverse(const DyadicRational& t, std::size_t max_digits)
{
    return box_inverse(t.value(), max_digits);
}

double box_inverse_value(double t, std::size_t max_digits)
{
    return to_double(value_of(box_inverse(exact_rational(t), max_digits)));
}

Rational exact_rational(double x)
{
    if (!std::isfinite(x)) {
        throw RangeError("exact_rational: non-finite input");
    }
    if (x == 0.0) {
        return Rational(0);
    }
    int e = 0;
    const double m = std::frexp(x, &e);
    // m * 2^53 is an integer
    const auto mant = static_cast<long long>(std::ldexp(m, 53));
    const int shift = e - 53;
    if (shift >= 0) {
        return Rational(BigInt(mant) << shift);
    }
    return Rational(BigInt(mant), BigInt(1) << (-shift));
}

CdfValue cdf(const MeasureModel& model, const Rational& x, int depth)
{
    if (x < 0 || x > 1) {
        throw RangeError("cdf: x must lie in [0,1]");
    }
    if (depth < 1) {
        throw DomainError("cdf: depth must be >= 1");
    }
    if (x == 0) {
        return {0.0, 0.0};
    }
    if (x == 1) {
        return {1.0, 0.0};
    }
    if (std::holds_alternative<LebesgueModel>(model.kind())) {
        return {to_double(x), 0.0};
    }
    if (std::holds_alternative<GaussModel>(model.kind())) {
        return {std::log1p(to_double(x)) / kLog2, 0.0};
    }
    const MassRule rule(model);
    const Word digits = cf_digits(x, static_cast<std::size_t>(depth));
    const bool exact = value_of(digits) == x;
    Branch b;
    double mass = 1.0;
    double left = 0.0;
    for (Digit a : digits) {
        // T_b preserves order when sign > 0; then the children left of I_{ba}
        // are those with larger digits.
        if (b.sign > 0) {
            left += rule.tail(b, mass, a + 1);
        } else {
            left += mass - rule.tail(b, mass, a);
        }
        mass = rule.child(b, mass, a);
        b = b.child(a);
    }
    if (exact) {
        // x = T_b(0) is the right endpoint of I_b when T_b reverses order.
        if (b.sign < 0) {
            left += mass;
        }
        return {left, model.truncated_mass()};
    }
    return {left + 0.5 * mass, 0.5 * mass + model.truncated_mass()};
}

CdfValue cdf(const MeasureModel& model, double x, int depth)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw RangeError("cdf: x must lie in [0,1]");
    }
    return cdf(model, exact_rational(x), depth);
}

} // namespace gaussline
