#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "semico/certificates.hpp"
#include "semico/errors.hpp"

using namespace semico;

namespace {

const SemicocycleInstance& tame() { return fixtures::instance("tame_rotation.json"); }
const SemicocycleInstance& nontame() { return fixtures::instance("nontame_rotation.json"); }
const SemicocycleInstance& tame_odo() { return fixtures::instance("tame_odometer.json"); }
const SemicocycleInstance& toeplitz_odo() { return fixtures::instance("nontame_odometer_binary.json"); }

Integer max_witness(const IndependenceCertificate& c)
{
    Integer m = 0;
    for (const auto& [k, h] : c.witnesses)
        if (abs(h) > m) m = abs(h);
    return m;
}

// Oracle for odometer values: first digit disagreement read off directly.
ExactScalar digit_oracle(const SemicocycleInstance& inst, const GroupElement& h, std::size_t n)
{
    auto w = std::get<OdometerPoint>(act(inst.sys, h, inst.sys.theta0()));
    const auto& c = std::get<OdometerPoint>(inst.centres[n]);
    std::size_t k = 0;
    while (w.digits[k] == c.digits[k])
        ++k;
    ExactScalar rho(pow2_inv(k + 1));
    if (rho >= inst.ladder.r(n, 1)) return 0;
    const auto& J = inst.blocks[inst.block_of[n] - 1];
    return J.contains(rho) ? eval_profile(inst.ladder, inst.variant, n, rho) : ExactScalar(0);
}

}  // namespace

TEST_CASE("s = 1 certificate on the tame rotation")
{
    auto c = find_nonnull_certificate(tame(), 1, 1000000);
    CHECK(c.query.positions == std::vector<GroupElement>{tame().anchors.g[1]});
    CHECK(c.witnesses.size() == 2);
    CHECK(evaluate(tame(), c.query.positions[0] + c.witnesses.at("1")) == Rational(1));
    CHECK(evaluate(tame(), c.query.positions[0] + c.witnesses.at("0")).sign() == 0);
    CHECK(verify_certificate(tame(), c).empty());
}

TEST_CASE("tampered certificates are rejected with the failing pair")
{
    auto c = find_nonnull_certificate(tame(), 3, 1000000);
    REQUIRE(verify_certificate(tame(), c).empty());
    // "101" -> witness of "010" flips every position
    c.witnesses["101"] = c.witnesses.at("010");
    auto r = verify_certificate(tame(), c);
    CHECK(r.problems.empty());
    REQUIRE(r.failures.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.failures[i].pattern == "101");
        CHECK(r.failures[i].position == i + 1);
    }

    auto d = find_nonnull_certificate(tame(), 2, 1000000);
    d.witnesses.erase("11");
    CHECK_FALSE(verify_certificate(tame(), d).problems.empty());
    auto e = find_nonnull_certificate(tame(), 2, 1000000);
    e.query.v1 = e.query.v0;
    CHECK_FALSE(verify_certificate(tame(), e).problems.empty());
}

TEST_CASE("tolerant targets still verify")
{
    auto c = find_nonnull_certificate(tame(), 2, 1000000, default_targets(Rational(1, 10)));
    CHECK(c.query.v0 == ValueSet{Rational(0), Rational(1, 10)});
    CHECK(verify_certificate(tame(), c).empty());
    CHECK_THROWS_AS(default_targets(Rational(1, 2)), PreconditionError);
}

TEST_CASE("non-tame certificates: vacuous, small and nested")
{
    auto z = find_nontame_certificate(nontame(), 0, 1000);
    CHECK(z.query.positions.empty());
    CHECK(verify_certificate(nontame(), z).empty());

    auto c3 = find_nontame_certificate(nontame(), 3, 200000000);
    REQUIRE(c3.witnesses.count("111"));
    for (const auto& g : c3.query.positions)
        CHECK(evaluate(nontame(), g + c3.witnesses.at("111")) == Rational(1));
    auto c4 = find_nontame_certificate(nontame(), 4, 200000000);
    CHECK(std::equal(c3.query.positions.begin(), c3.query.positions.end(), c4.query.positions.begin()));
    CHECK(verify_certificate(nontame(), c4).empty());
}

TEST_CASE("too small a bound is a loud search failure")
{
    CHECK_THROWS_WITH_AS(find_nontame_certificate(nontame(), 6, 10), doctest::Contains("no witness within bound 10"),
                         SearchError);
}

TEST_CASE("pattern census")
{
    const auto& inst = tame();
    std::vector<GroupElement> pos{inst.anchors.g[1]};
    auto zero = pattern_census(inst, pos, 0);
    CHECK(zero.size() == 1);
    auto c3 = find_nonnull_certificate(inst, 2, 1000000);
    Integer m = max_witness(c3);
    REQUIRE(m <= 500000);
    auto all = pattern_census(inst, c3.query.positions, m.get_si());
    CHECK(all.size() == 4);
    for (const auto& [k, h] : c3.witnesses)
        CHECK(all.count(k));
    // enlarging the bound never loses patterns
    auto small = pattern_census(inst, c3.query.positions, 1000);
    CHECK(std::includes(all.begin(), all.end(), small.begin(), small.end()));
}

TEST_CASE("odometer witnesses match a digit-level oracle")
{
    const auto& inst = tame_odo();
    for (std::size_t s = 1; s <= 3; ++s) {
        auto c = find_nonnull_certificate(inst, s, 0);
        REQUIRE(c.witnesses.size() == (std::size_t(1) << s));
        std::size_t alpha = block_alpha(s);
        for (const auto& [key, h] : c.witnesses)
            for (std::size_t k = 0; k < s; ++k) {
                ExactScalar want = key[k] == '1' ? ExactScalar(1) : ExactScalar(0);
                CHECK(digit_oracle(inst, inst.anchors.g[alpha + 1 + k] + h, alpha + 1 + k) == want);
            }
        CHECK(verify_certificate(inst, c).empty());
    }
}

TEST_CASE("Toeplitz verification on a constant instance")
{
    LadderParams lp;
    lp.base_kind = BaseKind::odometer_dyadic;
    lp.depth = 2;
    lp.level_length = 8;
    lp.spacing = 40;
    auto inst = build_nontame(BaseSystem::odometer(OdometerScale(), 128, {1, 0}), lp, ProfileVariant::binary);
    auto r = toeplitz_verify(inst, -64, 64, 64);
    CHECK(r.unverified.empty());
    CHECK(std::all_of(r.period.begin(), r.period.end(), [](auto p) { return p == 2; }));
    CHECK(r.density.front() == Rational(1));
}

TEST_CASE("Toeplitz verification on the binary odometer")
{
    const auto& inst = toeplitz_odo();
    const long long a = -2048, b = 2048;
    auto r = toeplitz_verify(inst, a, b, 4096);
    const std::size_t W = static_cast<std::size_t>(b - a + 1);
    REQUIRE(r.period.size() == W);
    CHECK(r.moduli.back() <= 4096);
    // density formula and monotonicity
    for (std::size_t k = 0; k < r.moduli.size(); ++k) {
        std::size_t cnt = 0;
        for (auto p : r.period)
            cnt += p && p <= r.moduli[k];
        Rational want(Integer(static_cast<unsigned long>(cnt)), Integer(static_cast<unsigned long>(W)));
        want.canonicalize();
        CHECK(r.density[k] == want);
        if (k) CHECK(r.density[k - 1] <= r.density[k]);
    }
    // re-evaluate claimed periods directly, including just outside the window
    for (std::size_t i = 0; i < W; i += 7) {
        auto p = static_cast<long long>(r.period[i]);
        if (!p) continue;
        long long j = a + static_cast<long long>(i);
        ExactScalar v = evaluate(inst, GroupElement(static_cast<long>(j)));
        for (long long t : {-2LL, -1LL, 1LL, 2LL}) {
            long long k = j + t * p;
            CHECK(evaluate(inst, GroupElement(static_cast<long>(k))) == v);
        }
    }
    CHECK(r.unverified_outside_shadow == 0);
    CHECK(r.verified_count() * 100 >= W * 99);
    CHECK_THROWS_AS(toeplitz_verify(tame(), 0, 10, 16), PreconditionError);
}

TEST_CASE("tameness report on the tame rotation")
{
    auto rep = tameness_precondition_report(tame(), GroupElement(-1000), GroupElement(2001));
    CHECK(rep.df_finite);
    CHECK(rep.df_points == 1);
    CHECK(rep.hits.theta0.empty());
    CHECK(rep.free_action);
    CHECK(rep.residues_disjoint.value());
}
