#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace semico {

using Integer = mpz_class;
using Rational = mpq_class;

Rational make_rational(long p, long q = 1);
Rational pow2_inv(unsigned long k);  // 2^{-k}
std::string to_string(const Integer& z);
std::string to_string(const Rational& r);  // "p/q" or "p"
Integer floor_rational(const Rational& r);
bool is_square_free(long d);

// Exact number a + b*sqrt(d) in Q or Q(sqrt d). Rational values carry d = 1.
class ExactScalar {
public:
    ExactScalar() = default;
    ExactScalar(long v) : a_(v) {}
    ExactScalar(const Rational& a) : a_(a) {}
    ExactScalar(const Integer& a) : a_(a) {}
    ExactScalar(const Rational& a, const Rational& b, long d);

    const Rational& rational_part() const { return a_; }
    const Rational& surd_part() const { return b_; }
    long discriminant() const { return d_; }
    bool is_rational() const { return sgn(b_) == 0; }
    int sign() const;

    ExactScalar operator-() const;
    ExactScalar& operator+=(const ExactScalar& o);
    ExactScalar& operator-=(const ExactScalar& o);
    ExactScalar& operator*=(const ExactScalar& o);
    ExactScalar& operator/=(const ExactScalar& o);

    friend ExactScalar operator+(ExactScalar x, const ExactScalar& y) { return x += y; }
    friend ExactScalar operator-(ExactScalar x, const ExactScalar& y) { return x -= y; }
    friend ExactScalar operator*(ExactScalar x, const ExactScalar& y) { return x *= y; }
    friend ExactScalar operator/(ExactScalar x, const ExactScalar& y) { return x /= y; }

    friend bool operator==(const ExactScalar& x, const ExactScalar& y);
    friend std::strong_ordering operator<=>(const ExactScalar& x, const ExactScalar& y);

    // comparisons against a rational without allocating a temporary scalar
    int compare(const Rational& r) const;

    Integer floor() const;
    ExactScalar frac() const;  // x - floor(x), in [0,1)
    ExactScalar abs() const { return sign() < 0 ? -*this : *this; }
    // floor(x * 2^bits), exact
    Integer floor_scaled(unsigned bits) const;
    double to_double() const;
    std::string to_string() const;

private:
    void adopt_field(const ExactScalar& o);

    Rational a_{0};
    Rational b_{0};
    long d_ = 1;
};

inline bool operator==(const ExactScalar& x, const Rational& r) { return x.compare(r) == 0; }
inline bool operator<(const ExactScalar& x, const Rational& r) { return x.compare(r) < 0; }
inline bool operator<=(const ExactScalar& x, const Rational& r) { return x.compare(r) <= 0; }
inline bool operator>(const ExactScalar& x, const Rational& r) { return x.compare(r) > 0; }
inline bool operator>=(const ExactScalar& x, const Rational& r) { return x.compare(r) >= 0; }

ExactScalar min(const ExactScalar& x, const ExactScalar& y);
ExactScalar max(const ExactScalar& x, const ExactScalar& y);

// The golden-mean angle (sqrt 5 - 1)/2.
ExactScalar golden_alpha();

}  // namespace semico
