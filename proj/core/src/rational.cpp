#include "jointdesc/rational.hpp"

#include <cctype>
#include <cmath>

#include "jointdesc/error.hpp"

namespace jointdesc {

namespace {

constexpr long kMaxDecimalExponent = 4096;

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

mpz_class parse_integer(std::string_view s, std::string_view whole) {
    std::string_view digits = s;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
    if (!all_digits(digits)) {
        throw Error(ErrorKind::ParseError, "not an integer: '" + std::string(whole) + "'");
    }
    std::string normalized(s.front() == '+' ? s.substr(1) : s);
    return mpz_class(normalized, 10);
}

mpz_class pow10(unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

Rational parse_decimal(std::string_view text) {
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string lowered;
    for (char c : s) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lowered == "nan" || lowered == "inf" || lowered == "infinity") {
        throw Error(ErrorKind::RationalizeError, "non-finite decimal '" + std::string(text) + "'");
    }

    long exponent = 0;
    if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
        std::string_view exp_part = s.substr(epos + 1);
        s = s.substr(0, epos);
        std::string_view exp_digits = exp_part;
        if (!exp_digits.empty() && (exp_digits.front() == '-' || exp_digits.front() == '+')) {
            exp_digits.remove_prefix(1);
        }
        if (!all_digits(exp_digits)) {
            throw Error(ErrorKind::ParseError, "bad exponent in '" + std::string(text) + "'");
        }
        if (exp_digits.size() > 6) {
            throw Error(ErrorKind::RationalizeError, "exponent out of range in '" + std::string(text) + "'");
        }
        exponent = std::stol(std::string(exp_part));
    }

    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        int_part = s.substr(0, dot);
        frac_part = s.substr(dot + 1);
    }
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part))) {
        throw Error(ErrorKind::ParseError, "not a number: '" + std::string(text) + "'");
    }

    exponent -= static_cast<long>(frac_part.size());
    if (exponent > kMaxDecimalExponent || exponent < -kMaxDecimalExponent) {
        throw Error(ErrorKind::RationalizeError, "exponent out of range in '" + std::string(text) + "'");
    }
    std::string digits = std::string(int_part) + std::string(frac_part);
    mpz_class mantissa(digits.empty() ? std::string("0") : digits, 10);
    if (negative) mantissa = -mantissa;

    mpq_class q;
    if (exponent >= 0) {
        q = mpq_class(mantissa * pow10(static_cast<unsigned long>(exponent)));
    } else {
        q = mpq_class(mantissa, pow10(static_cast<unsigned long>(-exponent)));
        q.canonicalize();
    }
    return Rational(q);
}

}  // namespace

Rational::Rational(long long num, long long den) : q_(static_cast<long>(num), static_cast<long>(den)) {
    if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
    q_.canonicalize();
}

Rational::Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

Rational Rational::parse(std::string_view text, std::optional<std::uint64_t> max_den) {
    auto start = text.find_first_not_of(" \t");
    auto end = text.find_last_not_of(" \t");
    if (start == std::string_view::npos) throw Error(ErrorKind::ParseError, "empty rational");
    text = text.substr(start, end - start + 1);

    Rational r;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        mpz_class num = parse_integer(text.substr(0, slash), text);
        std::string_view den_text = text.substr(slash + 1);
        if (!all_digits(den_text)) {
            throw Error(ErrorKind::ParseError, "bad denominator in '" + std::string(text) + "'");
        }
        mpz_class den(std::string(den_text), 10);
        if (den == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
        r = Rational(mpq_class(num, den));
        return r;  // explicit fractions are never rounded
    }
    r = parse_decimal(text);
    if (max_den && r.denominator() > *max_den) return r.limit_denominator(*max_den);
    return r;
}

Rational Rational::limit_denominator(std::uint64_t max_den) const {
    if (max_den == 0) throw Error(ErrorKind::InvalidArgument, "denominator cap must be positive");
    const mpz_class cap(static_cast<unsigned long>(max_den));
    if (q_.get_den() <= cap) return *this;

    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    mpz_class n = q_.get_num(), d = q_.get_den();
    while (true) {
        mpz_class a;
        mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
        mpz_class q2 = q0 + a * q1;
        if (q2 > cap) break;
        mpz_class p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        mpz_class rem = n - a * d;
        n = d;
        d = rem;
        if (d == 0) break;
    }
    mpz_class k;
    mpz_fdiv_q(k.get_mpz_t(), mpz_class(cap - q0).get_mpz_t(), q1.get_mpz_t());
    mpq_class bound1(p0 + k * p1, q0 + k * q1);
    mpq_class bound2(p1, q1);
    bound1.canonicalize();
    bound2.canonicalize();
    mpq_class d1 = ::abs(mpq_class(bound1 - q_));
    mpq_class d2 = ::abs(mpq_class(bound2 - q_));
    return Rational(d2 <= d1 ? bound2 : bound1);
}

Rational Rational::from_double(double value, std::uint64_t max_den) {
    if (!std::isfinite(value)) throw Error(ErrorKind::RationalizeError, "non-finite value");
    return Rational(mpq_class(value)).limit_denominator(max_den);
}

Rational Rational::pow(const Rational& base, unsigned exponent) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.q_.get_num_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), base.q_.get_den_mpz_t(), exponent);
    return Rational(mpq_class(num, den));
}

std::string Rational::to_string() const {
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rational Rational::abs() const { return Rational(mpq_class(::abs(q_))); }

Rational& Rational::operator+=(const Rational& o) {
    q_ += o.q_;
    return *this;
}
Rational& Rational::operator-=(const Rational& o) {
    q_ -= o.q_;
    return *this;
}
Rational& Rational::operator*=(const Rational& o) {
    q_ *= o.q_;
    return *this;
}
Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw Error(ErrorKind::InvalidArgument, "division by zero");
    q_ /= o.q_;
    return *this;
}

}  // namespace jointdesc
