#include "semico/orbit_scan.hpp"

#include <algorithm>
#include <cstdint>

#include "semico/base_systems.hpp"
#include "semico/errors.hpp"

namespace semico {

namespace {

using u128 = unsigned __int128;

constexpr unsigned kBits = 128;
const u128 kHalf = u128(1) << 127;
const u128 kGuard = u128(1) << 48;  // >> accumulated rounding of |h| * 1 ulp

u128 to_u128(const Integer& z)
{
    std::uint64_t w[2] = {0, 0};
    std::size_t count = 0;
    if (sgn(z) < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > kBits) throw std::logic_error("fixed-point overflow");
    mpz_export(w, &count, -1, sizeof(std::uint64_t), 0, 0, z.get_mpz_t());
    return (u128(w[1]) << 64) | w[0];
}

u128 fixed(const ExactScalar& x) { return to_u128(x.frac().floor_scaled(kBits)); }
u128 fixed(const Rational& x) { return to_u128(ExactScalar(x).floor_scaled(kBits)); }

struct Band {
    u128 lo, hi;
    std::size_t target;
};

}  // namespace

std::vector<std::optional<long long>> scan_distance_targets(const ExactScalar& alpha, const ExactScalar& x0,
                                                            const ExactScalar& centre,
                                                            const std::vector<DistanceTarget>& targets,
                                                            std::size_t tag_count, long long bound)
{
    std::vector<std::optional<long long>> found(tag_count);
    if (targets.empty() || bound < 0) return found;
    std::vector<Band> bands;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& t = targets[i];
        if (t.tag >= tag_count) throw PreconditionError("target tag out of range");
        if (sgn(t.lo) < 0 || t.hi > Rational(1, 2) || t.lo > t.hi)
            throw PreconditionError("distance band must satisfy 0 <= lo <= hi <= 1/2");
        bands.push_back({fixed(t.lo), fixed(t.hi), i});
    }
    std::sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.lo < b.lo; });
    u128 max_hi = 0;
    for (const auto& b : bands)
        max_hi = std::max(max_hi, b.hi);
    std::vector<u128> los(bands.size());
    for (std::size_t i = 0; i < bands.size(); ++i)
        los[i] = bands[i].lo;

    std::vector<bool> tag_used(tag_count, false);
    for (const auto& t : targets)
        tag_used[t.tag] = true;
    std::size_t remaining = static_cast<std::size_t>(std::count(tag_used.begin(), tag_used.end(), true));

    const u128 U0 = fixed(x0 - centre);
    const u128 A = fixed(alpha);
    const CirclePoint c(centre);

    auto exact_in = [&](long long h, const DistanceTarget& t) {
        CirclePoint p(x0 + ExactScalar(Rational(Integer(static_cast<long>(h)))) * alpha);
        ExactScalar d = circle_dist(p, c);
        return d >= t.lo && d <= t.hi;
    };
    auto visit = [&](long long h, u128 x) {
        u128 r = x <= kHalf ? x : u128(0) - x;
        if (r > max_hi + kGuard) return;
        auto it = std::upper_bound(los.begin(), los.end(), r + kGuard);
        for (std::size_t k = static_cast<std::size_t>(it - los.begin()); k-- > 0;) {
            const Band& b = bands[k];
            if (b.hi + kGuard < r) break;  // bands are disjoint apart from shared endpoints
            const DistanceTarget& t = targets[b.target];
            if (found[t.tag]) continue;
            bool inside = r >= b.lo + kGuard && r + kGuard <= b.hi;
            if (!inside) inside = exact_in(h, t);
            if (inside) {
                found[t.tag] = h;
                --remaining;
            }
        }
    };
    u128 up = U0, down = U0;
    visit(0, U0);
    for (long long k = 1; k <= bound && remaining; ++k) {
        up += A;
        down -= A;
        visit(k, up);
        if (remaining) visit(-k, down);
    }
    return found;
}

}  // namespace semico
