#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "semico/exact.hpp"

namespace semico {

using GroupElement = Integer;

// Point of R/Z; the value is always reduced into [0,1).
class CirclePoint {
public:
    CirclePoint() = default;
    explicit CirclePoint(const ExactScalar& v) : value_(v.frac()) {}
    const ExactScalar& value() const { return value_; }
    friend bool operator==(const CirclePoint&, const CirclePoint&) = default;

private:
    ExactScalar value_;
};

// How digits continue past the stored depth. zero/max are exact (non-negative and
// negative integers); opaque means "unknown", so agreement to full depth cannot be
// resolved.
enum class Tail { zero, max, opaque };

struct OdometerPoint {
    std::vector<std::uint32_t> digits;  // digits[k-1] is digit k, in Z/q_k
    Tail tail = Tail::zero;
    friend bool operator==(const OdometerPoint&, const OdometerPoint&) = default;
};

// Digit ratios q_k = n_k / n_{k-1}; entries past the listed ones repeat the last ratio.
class OdometerScale {
public:
    OdometerScale() : ratios_{2} {}
    explicit OdometerScale(std::vector<std::uint32_t> ratios);
    static OdometerScale from_moduli(const std::vector<Integer>& moduli);

    std::uint32_t ratio(std::size_t k) const;  // 1-based digit index
    Integer modulus(std::size_t k) const;      // n_k, n_0 = 1
    std::vector<Integer> moduli(std::size_t count) const;
    bool dyadic() const { return ratios_.size() == 1 && ratios_[0] == 2; }
    const std::vector<std::uint32_t>& ratios() const { return ratios_; }
    friend bool operator==(const OdometerScale&, const OdometerScale&) = default;

private:
    std::vector<std::uint32_t> ratios_;
};

using Point = std::variant<CirclePoint, OdometerPoint>;

enum class BallRelation { strictly_larger, equal_as_sets };

class BaseSystem {
public:
    // theta defaults to 0, theta0 to 1/7
    static BaseSystem rotation(const ExactScalar& alpha);
    // digit depth, theta = 0, theta0 = the repeating digit pattern (default 1,0,1,0,...)
    static BaseSystem odometer(const OdometerScale& scale, std::size_t depth,
                               std::vector<std::uint32_t> theta0_pattern = {1, 0});

    bool is_rotation() const { return rotation_; }
    bool is_odometer() const { return !rotation_; }
    const ExactScalar& alpha() const;
    const OdometerScale& scale() const;
    std::size_t depth() const { return depth_; }
    const std::vector<std::uint32_t>& theta0_pattern() const { return pattern_; }

    const Point& theta() const { return theta_; }
    const Point& theta0() const { return theta0_; }
    void set_theta(const Point& p);
    void set_theta0(const Point& p);

    // Same system with a different digit depth; theta/theta0 are regenerated if they
    // were the defaults.
    BaseSystem with_depth(std::size_t depth) const;

    // integer point g (i.e. g acting on 0) of the odometer
    OdometerPoint odometer_integer(const GroupElement& g) const;
    OdometerPoint odometer_pattern_point(const std::vector<std::uint32_t>& pattern) const;

    friend bool operator==(const BaseSystem&, const BaseSystem&) = default;

private:
    bool rotation_ = true;
    ExactScalar alpha_;
    OdometerScale scale_;
    std::size_t depth_ = 0;
    std::vector<std::uint32_t> pattern_;
    Point theta_;
    Point theta0_;
};

Point act(const BaseSystem& sys, const GroupElement& g, const Point& x);
CirclePoint rotate(const ExactScalar& alpha, const GroupElement& g, const CirclePoint& x);
OdometerPoint odometer_add(const BaseSystem& sys, const GroupElement& g, const OdometerPoint& x);

ExactScalar dist(const BaseSystem& sys, const Point& x, const Point& y);
ExactScalar circle_dist(const CirclePoint& x, const CirclePoint& y);
// index k of the first disagreeing digit (1-based), so that the distance is 2^{-k};
// nullopt means equal points. Throws DepthError when undecidable at stored depth.
std::optional<std::size_t> first_disagreement(const OdometerPoint& x, const OdometerPoint& y);

BallRelation ball_compare(const BaseSystem& sys, const Point& center, const ExactScalar& r,
                          const ExactScalar& r_inner);

// open balls B_r1(c1), B_r2(c2)
bool balls_disjoint(const BaseSystem& sys, const Point& c1, const ExactScalar& r1, const Point& c2,
                    const ExactScalar& r2);
// cl(B_r(c)) contained in the open ball B_R(t)
bool closed_ball_inside(const BaseSystem& sys, const Point& c, const ExactScalar& r, const Point& t,
                        const ExactScalar& R);
bool in_open_ball(const BaseSystem& sys, const Point& x, const Point& c, const ExactScalar& r);

// smallest j >= 1 with 2^{-j} < r (r > 0 rational)
std::size_t ultrametric_index(const Rational& r);

std::string describe(const Point& p);

}  // namespace semico
