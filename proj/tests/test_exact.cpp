#include <doctest.h>

#include "fixtures.hpp"
#include "semico/errors.hpp"
#include "semico/exact.hpp"

using namespace semico;

namespace {

// Independent numeric oracle: 1024-bit floating evaluation of a + b sqrt(d).
mpf_class approx(const ExactScalar& x)
{
    mpf_class a(x.rational_part(), 1024), b(x.surd_part(), 1024), d(x.discriminant(), 1024);
    mpf_class r(0, 1024);
    r = a + b * sqrt(d);
    return r;
}

int approx_sign(const ExactScalar& x)
{
    mpf_class v = approx(x);
    return sgn(v);
}

}  // namespace

TEST_CASE("scalar construction and rationality")
{
    ExactScalar a = golden_alpha();
    CHECK_FALSE(a.is_rational());
    CHECK(a.discriminant() == 5);
    CHECK(ExactScalar(make_rational(3, 4)).is_rational());
    CHECK_FALSE(a == make_rational(309, 500));
    CHECK(ExactScalar(make_rational(1, 2), Rational(0), 7).is_rational());
    CHECK_THROWS_AS(ExactScalar(Rational(0), Rational(1), 4), PreconditionError);
    CHECK_THROWS_AS(ExactScalar(Rational(0), Rational(1), 1), PreconditionError);
}

TEST_CASE("golden angle satisfies its minimal polynomial")
{
    ExactScalar a = golden_alpha();
    CHECK(a * a + a == ExactScalar(1));
    CHECK(a.floor() == 0);
    CHECK(a > make_rational(618, 1000));
    CHECK(a < make_rational(619, 1000));
}

TEST_CASE("random scalars: field laws hold exactly")
{
    fixtures::Gen g(11);
    for (long d : {2L, 3L, 5L, 7L}) {
        for (int i = 0; i < 400; ++i) {
            ExactScalar x = g.scalar(d), y = g.scalar(d), z = g.scalar(d);
            CHECK((x + y) - y == x);
            CHECK(x * (y + z) == x * y + x * z);
            CHECK((x + y) + z == x + (y + z));
            if (y.sign() != 0) CHECK((x * y) / y == x);
            CHECK(-(-x) == x);
            CHECK((x - x).sign() == 0);
        }
    }
}

TEST_CASE("random scalars: sign and order agree with a high-precision oracle")
{
    fixtures::Gen g(12);
    for (long d : {2L, 5L, 13L}) {
        for (int i = 0; i < 1000; ++i) {
            ExactScalar x = g.scalar(d), y = g.scalar(d);
            CHECK(x.sign() == approx_sign(x));
            int o = approx_sign(x - y);
            CHECK(((x < y) ? -1 : (x == y ? 0 : 1)) == o);
            Rational r = g.rational();
            CHECK(x.compare(r) == approx_sign(x - ExactScalar(r)));
        }
    }
}

TEST_CASE("floor, frac and scaled floor agree with the oracle")
{
    fixtures::Gen g(13);
    for (int i = 0; i < 500; ++i) {
        ExactScalar x = g.scalar(5);
        Integer f = x.floor();
        CHECK(ExactScalar(Rational(f)) <= x);
        CHECK(x < ExactScalar(Rational(f + 1)));
        ExactScalar fr = x.frac();
        CHECK(fr.sign() >= 0);
        CHECK(fr < Rational(1));
        CHECK(fr + ExactScalar(Rational(f)) == x);
        Integer s = fr.floor_scaled(64);
        mpf_class v = approx(fr);
        mpf_class scaled(0, 1024);
        mpf_mul_2exp(scaled.get_mpf_t(), v.get_mpf_t(), 64);
        mpz_class oracle(floor(scaled));
        CHECK(s == oracle);
    }
}

TEST_CASE("mixed fields are rejected")
{
    ExactScalar a(Rational(0), Rational(1), 2), b(Rational(0), Rational(1), 3);
    CHECK_THROWS_AS(a + b, PreconditionError);
}

TEST_CASE("rational helpers")
{
    CHECK(pow2_inv(5) == make_rational(1, 32));
    CHECK(to_string(make_rational(-6, 8)) == "-3/4");
    CHECK(to_string(Rational(7)) == "7");
    CHECK(floor_rational(make_rational(-1, 3)) == -1);
    CHECK(is_square_free(30));
    CHECK_FALSE(is_square_free(12));
}
