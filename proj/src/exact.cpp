#include "semico/exact.hpp"

#include <cmath>

#include <fmt/format.h>

#include "semico/errors.hpp"

namespace semico {

Rational make_rational(long p, long q)
{
    if (q == 0) throw PreconditionError("rational with zero denominator");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

Rational pow2_inv(unsigned long k)
{
    Rational r(1);
    mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), k);
    return r;
}

std::string to_string(const Integer& z) { return z.get_str(); }

std::string to_string(const Rational& r)
{
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Integer floor_rational(const Rational& r)
{
    Integer z;
    mpz_fdiv_q(z.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return z;
}

bool is_square_free(long d)
{
    if (d < 1) return false;
    for (long p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) return false;
    return true;
}

ExactScalar::ExactScalar(const Rational& a, const Rational& b, long d) : a_(a), b_(b), d_(d)
{
    if (sgn(b_) == 0) {
        d_ = 1;
        return;
    }
    if (d < 2 || !is_square_free(d))
        throw PreconditionError(fmt::format("discriminant {} is not a square-free integer > 1", d));
}

int ExactScalar::sign() const
{
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // opposite signs: compare a^2 with b^2 d
    Rational a2 = a_ * a_;
    Rational b2d = b_ * b_ * d_;
    int c = cmp(a2, b2d);
    return sa > 0 ? c : -c;
}

void ExactScalar::adopt_field(const ExactScalar& o)
{
    if (o.is_rational()) return;
    if (is_rational()) {
        d_ = o.d_;
        return;
    }
    if (d_ != o.d_)
        throw PreconditionError(fmt::format("mixed quadratic fields sqrt({}) and sqrt({})", d_, o.d_));
}

ExactScalar ExactScalar::operator-() const
{
    ExactScalar r = *this;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& o)
{
    adopt_field(o);
    a_ += o.a_;
    b_ += o.b_;
    if (sgn(b_) == 0) d_ = 1;
    return *this;
}

ExactScalar& ExactScalar::operator-=(const ExactScalar& o)
{
    adopt_field(o);
    a_ -= o.a_;
    b_ -= o.b_;
    if (sgn(b_) == 0) d_ = 1;
    return *this;
}

ExactScalar& ExactScalar::operator*=(const ExactScalar& o)
{
    adopt_field(o);
    if (o.is_rational()) {
        a_ *= o.a_;
        b_ *= o.a_;
    } else {
        Rational na = a_ * o.a_ + b_ * o.b_ * d_;
        Rational nb = a_ * o.b_ + b_ * o.a_;
        a_ = std::move(na);
        b_ = std::move(nb);
    }
    if (sgn(b_) == 0) d_ = 1;
    return *this;
}

ExactScalar& ExactScalar::operator/=(const ExactScalar& o)
{
    if (o.sign() == 0) throw PreconditionError("division by zero scalar");
    adopt_field(o);
    if (o.is_rational()) {
        a_ /= o.a_;
        b_ /= o.a_;
    } else {
        Rational norm = o.a_ * o.a_ - o.b_ * o.b_ * d_;
        Rational na = (a_ * o.a_ - b_ * o.b_ * d_) / norm;
        Rational nb = (b_ * o.a_ - a_ * o.b_) / norm;
        a_ = std::move(na);
        b_ = std::move(nb);
    }
    if (sgn(b_) == 0) d_ = 1;
    return *this;
}

bool operator==(const ExactScalar& x, const ExactScalar& y)
{
    if (x.a_ != y.a_ || x.b_ != y.b_) return false;
    return x.is_rational() || x.d_ == y.d_;
}

std::strong_ordering operator<=>(const ExactScalar& x, const ExactScalar& y)
{
    int s = (x - y).sign();
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

int ExactScalar::compare(const Rational& r) const
{
    if (is_rational()) return cmp(a_, r);
    ExactScalar t(a_ - r, b_, d_);
    return t.sign();
}

namespace {

// floor(b * sqrt(d)) for b != 0, d square-free > 1 (the product is irrational)
Integer floor_surd(const Rational& b, long d)
{
    Rational q = b * b * d;
    Integer fl = floor_rational(q);
    Integer s;
    mpz_sqrt(s.get_mpz_t(), fl.get_mpz_t());
    if (sgn(b) > 0) return s;
    return -s - 1;
}

}  // namespace

Integer ExactScalar::floor() const
{
    if (is_rational()) return floor_rational(a_);
    Integer s = floor_surd(b_, d_);
    Integer k = floor_rational(a_ + Rational(s));
    Rational next(Integer(k + 1));
    if (compare(next) >= 0) return k + 1;
    return k;
}

ExactScalar ExactScalar::frac() const
{
    Integer k = floor();
    ExactScalar r = *this;
    r.a_ -= Rational(k);
    return r;
}

Integer ExactScalar::floor_scaled(unsigned bits) const
{
    ExactScalar t = *this;
    mpq_mul_2exp(t.a_.get_mpq_t(), t.a_.get_mpq_t(), bits);
    mpq_mul_2exp(t.b_.get_mpq_t(), t.b_.get_mpq_t(), bits);
    return t.floor();
}

double ExactScalar::to_double() const
{
    if (is_rational()) return a_.get_d();
    return a_.get_d() + b_.get_d() * std::sqrt(static_cast<double>(d_));
}

std::string ExactScalar::to_string() const
{
    if (is_rational()) return semico::to_string(a_);
    return fmt::format("{} + {}*sqrt({})", semico::to_string(a_), semico::to_string(b_), d_);
}

ExactScalar min(const ExactScalar& x, const ExactScalar& y) { return y < x ? y : x; }
ExactScalar max(const ExactScalar& x, const ExactScalar& y) { return x < y ? y : x; }

ExactScalar golden_alpha() { return ExactScalar(make_rational(-1, 2), make_rational(1, 2), 5); }

}  // namespace semico
