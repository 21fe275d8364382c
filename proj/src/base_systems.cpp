#include "semico/base_systems.hpp"

#include <fmt/format.h>

#include "semico/errors.hpp"

namespace semico {

namespace {

const Rational kHalf = make_rational(1, 2);

// Digits of g below `depth`, stopping once the rest is constant: digits past out.size() are 0,
// or q - 1 when `fill` is set (g negative). `high` is floor(g / n_depth).
void expand(const OdometerScale& scale, const GroupElement& g, std::size_t depth,
            std::vector<std::uint32_t>& out, Integer& high, bool& fill)
{
    fill = sgn(g) < 0;
    if (scale.dyadic()) {
        Integer a = abs(g);
        std::size_t used = std::min(depth, mpz_sizeinbase(a.get_mpz_t(), 2) + 1);
        out.resize(used);
        for (std::size_t k = 0; k < used; ++k)
            out[k] = mpz_tstbit(g.get_mpz_t(), k);  // two's complement for negative g
        mpz_fdiv_q_2exp(high.get_mpz_t(), g.get_mpz_t(), depth);
        return;
    }
    out.clear();
    Integer v = g;
    for (std::size_t k = 0; k < depth; ++k) {
        if (v == 0 || v == -1) break;
        out.push_back(static_cast<std::uint32_t>(mpz_fdiv_q_ui(v.get_mpz_t(), v.get_mpz_t(), scale.ratio(k + 1))));
    }
    high = v;
}

}  // namespace

OdometerScale::OdometerScale(std::vector<std::uint32_t> ratios) : ratios_(std::move(ratios))
{
    if (ratios_.empty()) throw PreconditionError("odometer scale needs at least one modulus");
    for (std::size_t i = 0; i < ratios_.size(); ++i)
        if (ratios_[i] < 2)
            throw PreconditionError(fmt::format("odometer digit ratio {} at position {} is below 2",
                                                ratios_[i], i + 1));
    // canonical form: drop a repeated tail so equal scales compare equal
    while (ratios_.size() > 1 && ratios_[ratios_.size() - 1] == ratios_[ratios_.size() - 2])
        ratios_.pop_back();
}

OdometerScale OdometerScale::from_moduli(const std::vector<Integer>& moduli)
{
    if (moduli.empty()) throw PreconditionError("odometer scale needs at least one modulus");
    std::vector<std::uint32_t> ratios;
    Integer prev = 1;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        const Integer& n = moduli[i];
        if (n <= prev || n % prev != 0)
            throw PreconditionError(fmt::format("modulus {} does not strictly extend {} (need n_k | n_(k+1))",
                                                n.get_str(), prev.get_str()));
        Integer q = n / prev;
        if (!q.fits_uint_p() || q.get_ui() > 0xffffffffUL)
            throw PreconditionError(fmt::format("digit ratio {} too large", q.get_str()));
        ratios.push_back(static_cast<std::uint32_t>(q.get_ui()));
        prev = n;
    }
    return OdometerScale(std::move(ratios));
}

std::uint32_t OdometerScale::ratio(std::size_t k) const
{
    if (k == 0) throw PreconditionError("digit indices are 1-based");
    return k <= ratios_.size() ? ratios_[k - 1] : ratios_.back();
}

Integer OdometerScale::modulus(std::size_t k) const
{
    if (dyadic()) {
        Integer n;
        mpz_ui_pow_ui(n.get_mpz_t(), 2, k);
        return n;
    }
    Integer n = 1;
    for (std::size_t i = 1; i <= k; ++i)
        n *= ratio(i);
    return n;
}

std::vector<Integer> OdometerScale::moduli(std::size_t count) const
{
    std::vector<Integer> out;
    Integer n = 1;
    for (std::size_t i = 1; i <= count; ++i) {
        n *= ratio(i);
        out.push_back(n);
    }
    return out;
}

BaseSystem BaseSystem::rotation(const ExactScalar& alpha)
{
    if (alpha.is_rational()) throw PreconditionError("rotation angle must be irrational");
    BaseSystem s;
    s.rotation_ = true;
    s.alpha_ = alpha;
    s.theta_ = CirclePoint(ExactScalar(0));
    s.theta0_ = CirclePoint(ExactScalar(make_rational(1, 7)));
    return s;
}

BaseSystem BaseSystem::odometer(const OdometerScale& scale, std::size_t depth,
                                std::vector<std::uint32_t> theta0_pattern)
{
    if (depth == 0) throw PreconditionError("odometer digit depth must be positive");
    if (theta0_pattern.empty()) throw PreconditionError("empty theta0 digit pattern");
    BaseSystem s;
    s.rotation_ = false;
    s.scale_ = scale;
    s.depth_ = depth;
    s.pattern_ = std::move(theta0_pattern);
    s.theta_ = s.odometer_integer(0);
    s.theta0_ = s.odometer_pattern_point(s.pattern_);
    return s;
}

const ExactScalar& BaseSystem::alpha() const
{
    if (!rotation_) throw PreconditionError("odometer has no rotation angle");
    return alpha_;
}

const OdometerScale& BaseSystem::scale() const
{
    if (rotation_) throw PreconditionError("rotation has no odometer scale");
    return scale_;
}

void BaseSystem::set_theta(const Point& p)
{
    if (rotation_ != std::holds_alternative<CirclePoint>(p)) throw PreconditionError("theta of wrong kind");
    theta_ = p;
}

void BaseSystem::set_theta0(const Point& p)
{
    if (rotation_ != std::holds_alternative<CirclePoint>(p)) throw PreconditionError("theta0 of wrong kind");
    theta0_ = p;
}

BaseSystem BaseSystem::with_depth(std::size_t depth) const
{
    if (rotation_) return *this;
    return odometer(scale_, depth, pattern_);
}

OdometerPoint BaseSystem::odometer_integer(const GroupElement& g) const
{
    OdometerPoint zero;
    zero.digits.assign(depth_, 0);
    zero.tail = Tail::zero;
    return odometer_add(*this, g, zero);
}

OdometerPoint BaseSystem::odometer_pattern_point(const std::vector<std::uint32_t>& pattern) const
{
    OdometerPoint p;
    p.digits.resize(depth_);
    for (std::size_t k = 0; k < depth_; ++k) {
        std::uint32_t d = pattern[k % pattern.size()];
        if (d >= scale_.ratio(k + 1))
            throw PreconditionError(fmt::format("digit {} at position {} exceeds its modulus", d, k + 1));
        p.digits[k] = d;
    }
    p.tail = Tail::opaque;
    return p;
}

CirclePoint rotate(const ExactScalar& alpha, const GroupElement& g, const CirclePoint& x)
{
    if (g == 0) return x;
    return CirclePoint(x.value() + ExactScalar(Rational(g)) * alpha);
}

OdometerPoint odometer_add(const BaseSystem& sys, const GroupElement& g, const OdometerPoint& x)
{
    const OdometerScale& scale = sys.scale();
    const std::size_t depth = x.digits.size();
    if (g == 0) return x;
    std::vector<std::uint32_t> gd;
    Integer high;
    bool fill = false;
    expand(scale, g, depth, gd, high, fill);

    OdometerPoint out;
    out.digits = x.digits;
    std::uint64_t carry = 0;
    for (std::size_t k = 0; k < depth; ++k) {
        std::uint64_t q = scale.ratio(k + 1);
        std::uint64_t d;
        if (k < gd.size()) {
            d = gd[k];
        } else {
            // past the digits of g nothing changes once the carry settles: x + 0 + 0 or x + (q - 1) + 1
            if (carry == (fill ? 1u : 0u)) break;
            d = fill ? q - 1 : 0;
        }
        std::uint64_t s = static_cast<std::uint64_t>(x.digits[k]) + d + carry;
        carry = s >= q ? 1 : 0;
        out.digits[k] = static_cast<std::uint32_t>(s - carry * q);
    }
    if (x.tail == Tail::opaque) {
        out.tail = Tail::opaque;
        return out;
    }
    // value = digits + n_D * (carry + tail offset + floor(g / n_D))
    Integer hi = high + static_cast<unsigned long>(carry);
    if (x.tail == Tail::max) hi -= 1;
    if (hi == 0)
        out.tail = Tail::zero;
    else if (hi == -1)
        out.tail = Tail::max;
    else
        throw DepthError(fmt::format("insufficient depth: integer point leaves the {} stored digits", depth));
    return out;
}

Point act(const BaseSystem& sys, const GroupElement& g, const Point& x)
{
    if (sys.is_rotation()) {
        const auto* c = std::get_if<CirclePoint>(&x);
        if (!c) throw PreconditionError("point is not a circle point");
        return rotate(sys.alpha(), g, *c);
    }
    const auto* o = std::get_if<OdometerPoint>(&x);
    if (!o) throw PreconditionError("point is not an odometer point");
    return odometer_add(sys, g, *o);
}

ExactScalar circle_dist(const CirclePoint& x, const CirclePoint& y)
{
    ExactScalar d = (x.value() - y.value()).abs();
    ExactScalar e = ExactScalar(1) - d;
    return e < d ? e : d;
}

std::optional<std::size_t> first_disagreement(const OdometerPoint& x, const OdometerPoint& y)
{
    if (x.digits.size() != y.digits.size())
        throw PreconditionError(fmt::format("odometer points at different depths {} and {}", x.digits.size(),
                                            y.digits.size()));
    for (std::size_t k = 0; k < x.digits.size(); ++k)
        if (x.digits[k] != y.digits[k]) return k + 1;
    if (x.tail == y.tail && x.tail != Tail::opaque) return std::nullopt;
    throw DepthError(fmt::format("insufficient depth: points agree on all {} stored digits", x.digits.size()));
}

ExactScalar dist(const BaseSystem& sys, const Point& x, const Point& y)
{
    if (sys.is_rotation()) {
        const auto* a = std::get_if<CirclePoint>(&x);
        const auto* b = std::get_if<CirclePoint>(&y);
        if (!a || !b) throw PreconditionError("points are not circle points");
        return circle_dist(*a, *b);
    }
    const auto* a = std::get_if<OdometerPoint>(&x);
    const auto* b = std::get_if<OdometerPoint>(&y);
    if (!a || !b) throw PreconditionError("points are not odometer points");
    auto k = first_disagreement(*a, *b);
    if (!k) return ExactScalar(0);
    return ExactScalar(pow2_inv(*k));
}

std::size_t ultrametric_index(const Rational& r)
{
    if (sgn(r) <= 0) throw PreconditionError("radius must be positive");
    Rational inv = 1 / r;
    Integer t = floor_rational(inv);
    std::size_t bits = sgn(t) == 0 ? 0 : mpz_sizeinbase(t.get_mpz_t(), 2);
    return bits < 1 ? 1 : bits;
}

BallRelation ball_compare(const BaseSystem& sys, const Point&, const ExactScalar& r, const ExactScalar& r_inner)
{
    if (!(r_inner.sign() > 0 && r_inner < r && r <= kHalf))
        throw PreconditionError(
            fmt::format("ball_compare needs 0 < r' < r <= 1/2, got r={} r'={}", r.to_string(), r_inner.to_string()));
    if (sys.is_rotation()) return BallRelation::strictly_larger;
    if (!r.is_rational() || !r_inner.is_rational()) throw PreconditionError("odometer radii must be rational");
    std::size_t k = ultrametric_index(r.rational_part());
    return pow2_inv(k) >= r_inner.rational_part() ? BallRelation::strictly_larger : BallRelation::equal_as_sets;
}

bool balls_disjoint(const BaseSystem& sys, const Point& c1, const ExactScalar& r1, const Point& c2,
                    const ExactScalar& r2)
{
    ExactScalar d = dist(sys, c1, c2);
    if (sys.is_rotation()) return d >= r1 + r2;
    return d >= max(r1, r2);
}

bool closed_ball_inside(const BaseSystem& sys, const Point& c, const ExactScalar& r, const Point& t,
                        const ExactScalar& R)
{
    ExactScalar d = dist(sys, c, t);
    if (sys.is_rotation()) return d + r < R;
    // clopen cylinders: B_r(c) has prefix length index(r) - 1
    if (ultrametric_index(r.rational_part()) < ultrametric_index(R.rational_part())) return false;
    return d < R;
}

bool in_open_ball(const BaseSystem& sys, const Point& x, const Point& c, const ExactScalar& r)
{
    return dist(sys, x, c) < r;
}

std::string describe(const Point& p)
{
    if (const auto* c = std::get_if<CirclePoint>(&p)) return c->value().to_string();
    const auto& o = std::get<OdometerPoint>(p);
    std::string s = "(";
    std::size_t shown = o.digits.size() < 24 ? o.digits.size() : 24;
    for (std::size_t k = 0; k < shown; ++k) {
        if (k) s += ",";
        s += std::to_string(o.digits[k]);
    }
    if (shown < o.digits.size()) s += ",...";
    s += o.tail == Tail::zero ? ";0^inf)" : o.tail == Tail::max ? ";max^inf)" : ";?)";
    return s;
}

}  // namespace semico
