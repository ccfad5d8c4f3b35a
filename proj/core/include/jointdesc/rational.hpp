#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace jointdesc {

// Exact rational in lowest terms with a positive denominator. Thin value
// wrapper over GMP's mpq_class; every constructor canonicalizes.
class Rational {
public:
    Rational() = default;
    Rational(long long value) : q_(static_cast<long>(value)) {}  // NOLINT(implicit)
    Rational(long long num, long long den);
    explicit Rational(mpq_class q);

    // Accepts "p/q", an integer, or a terminating decimal ("0.125", "-1.5e-3").
    // Decimals are exact; when max_den is set and the exact value needs a
    // larger denominator, the nearest fraction within the cap is returned.
    static Rational parse(std::string_view text,
                          std::optional<std::uint64_t> max_den = std::nullopt);

    // Nearest fraction with denominator <= max_den (continued fractions).
    static Rational from_double(double value, std::uint64_t max_den);
    Rational limit_denominator(std::uint64_t max_den) const;

    static Rational pow(const Rational& base, unsigned exponent);

    const mpq_class& value() const noexcept { return q_; }
    mpz_class numerator() const { return q_.get_num(); }
    mpz_class denominator() const { return q_.get_den(); }

    // Always "p/q", including integers ("1/1", "0/1").
    std::string to_string() const;
    double to_double() const { return q_.get_d(); }

    int sign() const noexcept { return sgn(q_); }
    bool is_zero() const noexcept { return sign() == 0; }
    Rational abs() const;

    Rational operator-() const { return Rational(mpq_class(-q_)); }
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.to_string();
    }

private:
    mpq_class q_{0};
};

}  // namespace jointdesc
