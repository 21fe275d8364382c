#include <doctest.h>

#include "fixtures.hpp"
#include "semico/errors.hpp"
#include "semico/semicocycle.hpp"

using namespace semico;

namespace {

const SemicocycleInstance& tame() { return fixtures::instance("tame_rotation.json"); }
const SemicocycleInstance& nontame() { return fixtures::instance("nontame_rotation.json"); }
const SemicocycleInstance& tame_odo() { return fixtures::instance("tame_odometer.json"); }

const SemicocycleInstance& nontame_binary()
{
    static SemicocycleInstance inst = [] {
        RunConfig cfg = fixtures::config("nontame_rotation.json");
        cfg.variant = ProfileVariant::binary;
        return build_instance(cfg);
    }();
    return inst;
}

Point shifted(const Point& c, const Rational& x)
{
    return CirclePoint(std::get<CirclePoint>(c).value() + ExactScalar(x));
}

Rational mid(const CellRef& c) { return (c.lo + c.hi) / 2; }

// Independent oracle: the balls B(c_n, r_1^n) containing omega, by exact distance.
std::vector<std::size_t> balls_containing(const SemicocycleInstance& inst, const Point& w)
{
    std::vector<std::size_t> out;
    for (std::size_t n = 1; n <= inst.depth(); ++n)
        if (dist(inst.sys, w, inst.centres[n]) < inst.ladder.r(n, 1)) out.push_back(n);
    if (inst.anchors.theta_prime && dist(inst.sys, w, *inst.anchors.theta_prime) < inst.ladder.r(1, 1))
        out.push_back(0);
    return out;
}

ExactScalar oracle_value(const SemicocycleInstance& inst, const Point& w)
{
    auto in = balls_containing(inst, w);
    if (in.empty()) return 0;
    REQUIRE(in.size() == 1);
    std::size_t n = in[0];
    const Point& c = n == 0 ? *inst.anchors.theta_prime : inst.centres[n];
    ExactScalar rho = dist(inst.sys, w, c);
    if (inst.construction == Construction::nontame) return eval_profile(inst.ladder, inst.variant, n ? n : 1, rho);
    int s = inst.block_of[n];
    return s ? eval_bar(inst.ladder, inst.variant, inst.blocks[s - 1], n, rho) : ExactScalar(0);
}

}  // namespace

TEST_CASE("instances satisfy their side conditions")
{
    CHECK(check_instance(tame()).empty());
    CHECK(check_instance(nontame()).empty());
    CHECK(check_instance(tame_odo()).empty());
    CHECK(check_instance(nontame_binary()).empty());
}

TEST_CASE("value at the anchors")
{
    CHECK(value_at(tame(), tame().centres[0]).sign() == 0);
    CHECK(evaluate_detail(tame(), tame().centres[0]).on_theta_set);
    for (std::size_t n = 0; n < nontame().centres.size(); ++n) {
        auto e = evaluate_detail(nontame(), nontame().centres[n]);
        CHECK(e.on_theta_set);
        CHECK(e.value.sign() == 0);
    }
    CHECK(value_at(nontame(), *nontame().anchors.theta_prime).sign() == 0);
    CHECK(value_at(tame_odo(), tame_odo().centres[0]).sign() == 0);
}

TEST_CASE("a plateau point of block 2 evaluates to one")
{
    const auto& inst = tame();
    const auto& J = inst.blocks[1];
    REQUIRE(J.alpha == 1);
    bool tried = false;
    for (std::size_t j = 2; j < inst.ladder.length(2); j += 4) {
        Rational x = mid(cell(inst.ladder, 2, j));
        if (!J.contains(ExactScalar(x))) continue;
        auto e = evaluate_detail(inst, shifted(inst.centres[2], x));
        REQUIRE(e.active.size() == 1);
        CHECK(e.active[0].first == 2);
        CHECK(e.value == Rational(1));
        tried = true;
        break;
    }
    CHECK(tried);
}

TEST_CASE("the theta-prime summand realizes f_1")
{
    const auto& inst = nontame();
    Rational x = mid(cell(inst.ladder, 1, 2));
    auto e = evaluate_detail(inst, shifted(*inst.anchors.theta_prime, x));
    REQUIRE(e.active.size() == 1);
    CHECK(e.active[0].first == 0);
    CHECK(e.value == Rational(1));
}

TEST_CASE("random points: at most one summand, matching a ball-count oracle")
{
    fixtures::Gen g(31);
    for (const SemicocycleInstance* inst : {&tame(), &nontame(), &nontame_binary()}) {
        for (int i = 0; i < 1000; ++i) {
            Point w;
            if (i % 2) {
                w = CirclePoint(ExactScalar(g.unit_rational(1000000000)));
            } else {
                // concentrate near the anchors where summands are live
                std::size_t n = static_cast<std::size_t>(g.integer(1, static_cast<long>(inst->depth())));
                Rational off = inst->ladder.r(n, 1) * g.rational(1000, 1000) / 1000;
                w = shifted(inst->centres[n], off);
            }
            auto e = evaluate_detail(*inst, w);
            CHECK(e.active.size() <= balls_containing(*inst, w).size());
            CHECK(e.active.size() <= 1);
            if (!e.on_theta_set) CHECK(e.value == oracle_value(*inst, w));
            CHECK(value_at(*inst, w) == e.value);
        }
    }
}

TEST_CASE("discontinuity descriptors")
{
    auto d = discontinuities(tame());
    CHECK(d.finite);
    CHECK(d.points.size() == 1);
    CHECK(d.spheres.empty());
    CHECK(is_discontinuity(tame(), d, tame().centres[0]));

    auto n = discontinuities(nontame());
    CHECK_FALSE(n.finite);
    CHECK(n.points.size() == nontame().depth() + 2);
    CHECK(n.point_anchor.back() == DiscontinuityDescriptor::npos);

    const auto& b = nontame_binary();
    auto db = discontinuities(b);
    CHECK_FALSE(db.spheres.empty());
    CHECK(is_discontinuity(b, db, shifted(b.centres[1], b.ladder.r(1, 2))));
    CHECK(is_discontinuity(b, db, shifted(b.centres[1], -b.ladder.r(1, 3))));
    CHECK_FALSE(is_discontinuity(b, db, shifted(b.centres[1], mid(cell(b.ladder, 1, 2)))));
}

TEST_CASE("orbit hits of the tame instance")
{
    auto rep = orbit_hits(tame(), GroupElement(-50000), GroupElement(100001));
    CHECK(rep.theta0.empty());
    REQUIRE(rep.theta.size() == 1);
    CHECK(rep.theta[0].h == 0);
    CHECK(rep.theta_prime.empty());
}

TEST_CASE("words are shift-equivariant")
{
    for (const SemicocycleInstance* inst : {&tame(), &nontame(), &tame_odo()}) {
        Word a = word(*inst, window_range(-5, 5), 3);
        Word b = word(*inst, window_range(-2, 8));
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].first + 3 == b[i].first);
            CHECK(a[i].second == b[i].second);
            CHECK(a[i].second == evaluate(*inst, b[i].first));
        }
    }
    CHECK_THROWS_AS(window_range(3, 2), PreconditionError);
}

TEST_CASE("residue keys and odometer values")
{
    ExactScalar a = golden_alpha();
    fixtures::Gen g(32);
    for (int i = 0; i < 200; ++i) {
        ExactScalar x(g.unit_rational());
        ExactScalar y = x + ExactScalar(g.integer(-1000, 1000)) * a + ExactScalar(g.integer(-5, 5));
        CHECK(residue_key(a, x) == residue_key(a, y));
    }
    CHECK_FALSE(residue_key(a, ExactScalar(make_rational(1, 3))) == residue_key(a, ExactScalar(make_rational(1, 4))));
    BaseSystem o = BaseSystem::odometer(OdometerScale(), 20);
    CHECK(odometer_value(o, o.odometer_integer(12345)).value() == 12345);
    CHECK(odometer_value(o, o.odometer_integer(-7)).value() == -7);
    CHECK_FALSE(odometer_value(o, o.odometer_pattern_point({1, 0})).has_value());
}
