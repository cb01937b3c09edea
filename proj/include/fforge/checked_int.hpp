#ifndef FFORGE_CHECKED_INT_HPP
#define FFORGE_CHECKED_INT_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fforge {

// Integer arithmetic that refuses to wrap around.  All sl2z work is exact;
// a silent overflow would turn a certificate into garbage, so we throw instead.
struct OverflowError : std::runtime_error {
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

inline std::int64_t checked_add(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_add_overflow(x, y, &r)) throw OverflowError("integer overflow in add");
    return r;
}

inline std::int64_t checked_sub(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_sub_overflow(x, y, &r)) throw OverflowError("integer overflow in sub");
    return r;
}

inline std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_mul_overflow(x, y, &r)) throw OverflowError("integer overflow in mul");
    return r;
}

inline std::int64_t checked_neg(std::int64_t x) {
    return checked_sub(0, x);
}

// Floored division (rounds toward -infinity), y != 0.
inline std::int64_t floor_div(std::int64_t x, std::int64_t y) {
    std::int64_t q = x / y;
    if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
    return q;
}

inline std::int64_t ceil_div(std::int64_t x, std::int64_t y) {
    return checked_neg(floor_div(checked_neg(x), y));
}

// Largest s with s*s <= n (n >= 0).
inline std::int64_t isqrt64(std::int64_t n) {
    if (n < 0) throw std::domain_error("isqrt64 of negative value");
    if (n == 0) return 0;
    auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (s > 0 && s * s > n) --s;
    while ((s + 1) * (s + 1) <= n) ++s;
    return s;
}

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// x*a + y*b == gcd(a,b); plain extended Euclid.
inline void bezout64(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
    std::int64_t old_r = a, r = b;
    std::int64_t old_x = 1, xx = 0;
    std::int64_t old_y = 0, yy = 1;
    while (r != 0) {
        std::int64_t q = old_r / r;
        std::int64_t t;
        t = old_r - q * r; old_r = r; r = t;
        t = old_x - q * xx; old_x = xx; xx = t;
        t = old_y - q * yy; old_y = yy; yy = t;
    }
    if (old_r < 0) { old_r = -old_r; old_x = -old_x; old_y = -old_y; }
    x = old_x;
    y = old_y;
}

// Reduced fraction with positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) throw std::domain_error("Rational with zero denominator");
        if (den < 0) { num = checked_neg(num); den = checked_neg(den); }
        std::int64_t g = gcd64(num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    static Rational of(std::int64_t n) { return Rational(n, 1); }

    Rational operator+(const Rational& o) const {
        return Rational(checked_add(checked_mul(num, o.den), checked_mul(o.num, den)),
                        checked_mul(den, o.den));
    }
    Rational operator-(const Rational& o) const {
        return Rational(checked_sub(checked_mul(num, o.den), checked_mul(o.num, den)),
                        checked_mul(den, o.den));
    }
    Rational operator*(const Rational& o) const {
        return Rational(checked_mul(num, o.num), checked_mul(den, o.den));
    }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        return checked_mul(num, o.den) < checked_mul(o.num, den);
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

}  // namespace fforge

#endif  // FFORGE_CHECKED_INT_HPP
