#include "semico/ladder.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "semico/errors.hpp"

namespace semico {

std::string to_string(BaseKind k)
{
    return k == BaseKind::rotation_rationals ? "rotation_rationals" : "odometer_dyadic";
}

BaseKind base_kind_from_string(const std::string& s)
{
    if (s == "rotation_rationals" || s == "rotation") return BaseKind::rotation_rationals;
    if (s == "odometer_dyadic" || s == "odometer") return BaseKind::odometer_dyadic;
    throw ConfigError(fmt::format("unknown ladder base kind '{}'", s));
}

std::size_t next_level_length(std::size_t length, std::size_t m)
{
    if (m > length) return 0;
    std::size_t tail = length - m + 1;
    std::size_t evens = 0;
    if (length >= m + 2) evens = (length - 1 - (m + 1)) / 2 + 1;
    return tail + 2 * evens;
}

std::vector<Rational> next_level(const std::vector<Rational>& level, std::size_t m, const Rational& t_low,
                                 const Rational& t_high)
{
    const std::size_t L = level.size();
    std::vector<Rational> out;
    out.reserve(next_level_length(L, m));
    for (std::size_t i = m; i <= L; ++i) {
        out.push_back(level[i - 1]);
        if (i % 2 == 0 && i < L) {
            const Rational& hi = level[i - 1];
            const Rational& lo = level[i];
            Rational gap = hi - lo;
            out.push_back(lo + t_high * gap);
            out.push_back(lo + t_low * gap);
        }
    }
    return out;
}

std::vector<Rational> default_level_one(std::size_t depth, std::size_t length)
{
    // unit fractions 1/d_i, d_1 = 2, d_{i+1} = max(d_i + 1, ceil(d_i (1000+g)/1000)) with the
    // least per-mille growth g reaching d_L >= 2^(depth+1)
    Integer target;
    mpz_ui_pow_ui(target.get_mpz_t(), 2, depth + 1);
    std::vector<Integer> d;
    for (unsigned long g = 0;; ++g) {
        d.assign(1, Integer(2));
        for (std::size_t i = 1; i < length; ++i) {
            Integer x = d.back() * (1000 + g);
            Integer c;
            mpz_cdiv_q_ui(c.get_mpz_t(), x.get_mpz_t(), 1000);
            d.push_back(std::max<Integer>(c, d.back() + 1));
        }
        if (d.back() >= target || length <= 1) break;
    }
    std::vector<Rational> out;
    out.reserve(d.size());
    for (const auto& x : d)
        out.emplace_back(Integer(1), x);
    return out;
}

namespace {

// keeps uncapped schedules (lengths grow about 1.5x per level) from exhausting memory
constexpr std::size_t kMaxStoredRadii = std::size_t(1) << 22;

void check_split(const LadderParams& p)
{
    if (!(sgn(p.split_low) > 0 && p.split_low < p.split_high && p.split_high < 1))
        throw PreconditionError("split fractions must satisfy 0 < t_low < t_high < 1");
    if (!(sgn(p.tail_ratio) > 0 && p.tail_ratio < 1)) throw PreconditionError("tail ratio must lie in (0,1)");
}

std::vector<Rational> odometer_placeholder(std::size_t length)
{
    // any strictly decreasing values work: only the order of radii is used
    std::vector<Rational> out;
    for (std::size_t i = 1; i <= length; ++i)
        out.emplace_back(Integer(length - i + 1), Integer(2 * (length + 1)));
    return out;
}

// Replaces placeholder values by powers 2^{-e}, preserving the global order of radii.
void allocate_exponents(RadiiLadder& L, const LadderParams& p)
{
    std::vector<Rational> all;
    for (const auto& lev : L.levels)
        all.insert(all.end(), lev.begin(), lev.end());
    std::sort(all.begin(), all.end(), [](const Rational& a, const Rational& b) { return a > b; });
    all.erase(std::unique(all.begin(), all.end()), all.end());

    auto pos = [&](const Rational& x) {
        auto it = std::lower_bound(all.begin(), all.end(), x, [](const Rational& a, const Rational& b) { return a > b; });
        return static_cast<std::size_t>(it - all.begin());
    };
    const auto& one = L.levels.front();
    std::vector<std::size_t> at(one.size());
    for (std::size_t k = 0; k < one.size(); ++k)
        at[k] = pos(one[k]);

    std::vector<unsigned long> c(one.size());
    long base = p.spacing ? *p.spacing : p.min_spacing;
    if (base < 1) throw PreconditionError("odometer spacing must be positive");
    c[0] = static_cast<unsigned long>(base);
    for (std::size_t k = 0; k + 1 < one.size(); ++k) {
        std::size_t need = at[k + 1] - at[k];  // inner radii + 1
        if (p.spacing) {
            if (need > static_cast<std::size_t>(*p.spacing))
                throw CapacityError(fmt::format(
                    "capacity exhausted; widen base spacing: gap between level-1 radii {} and {} needs {} exponent "
                    "steps but spacing is {}",
                    k + 1, k + 2, need, *p.spacing));
            c[k + 1] = c[k] + static_cast<unsigned long>(*p.spacing);
        } else {
            c[k + 1] = c[k] + std::max<unsigned long>(need, static_cast<unsigned long>(p.min_spacing));
        }
    }
    std::vector<unsigned long> expo(all.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        while (k + 1 < at.size() && at[k + 1] <= i)
            ++k;
        expo[i] = c[k] + (i - at[k]);
    }
    for (auto& lev : L.levels)
        for (auto& r : lev)
            r = pow2_inv(expo[pos(r)]);
}

}  // namespace

LadderBuilder::LadderBuilder(const LadderParams& params) : params_(params)
{
    check_split(params_);
    if (params_.depth < 1) throw PreconditionError("ladder depth must be at least 1");
    ladder_.base_kind = params_.base_kind;
    ladder_.tail_ratio = params_.tail_ratio;
    std::vector<Rational> one;
    if (params_.base_kind == BaseKind::odometer_dyadic) {
        if (params_.level_length < 2) throw PreconditionError("level length must be at least 2");
        one = odometer_placeholder(params_.level_length);
    } else if (!params_.level_one.empty()) {
        one = params_.level_one;
    } else {
        if (params_.level_length < 1) throw PreconditionError("level length must be at least 1");
        one = default_level_one(params_.depth, params_.level_length);
    }
    for (std::size_t i = 0; i < one.size(); ++i) {
        if (sgn(one[i]) <= 0 || one[i] > Rational(1, 2))
            throw PreconditionError(fmt::format("level-1 radius {} outside (0, 1/2]", i + 1));
        if (i && !(one[i] < one[i - 1]))
            throw PreconditionError(fmt::format("level-1 radii not strictly decreasing at index {}", i + 1));
    }
    if (params_.base_kind == BaseKind::rotation_rationals && one.front() > params_.tail_ratio)
        throw PreconditionError("r_1^1 exceeds the tail bound");
    ladder_.levels.push_back(std::move(one));
}

std::size_t LadderBuilder::extend(const LinkAcceptor& accept)
{
    const std::size_t n = ladder_.depth();
    const auto& cur = ladder_.levels.back();
    const std::size_t L = cur.size();
    const bool rotation = params_.base_kind == BaseKind::rotation_rationals;

    Rational bound = 1;
    for (std::size_t k = 0; k <= n; ++k)
        bound *= params_.tail_ratio;

    auto admissible = [&](std::size_t m) {
        if (m > L) return false;
        if (next_level_length(L, m) < 2) return false;
        if (rotation && cur[m - 1] > bound) return false;
        if (params_.max_level_length && next_level_length(L, m) > params_.max_level_length) return false;
        return !accept || accept(n + 1, m, cur[m - 1]);
    };

    std::size_t m = 0;
    if (!params_.m_schedule.empty()) {
        if (params_.m_schedule.size() < n)
            throw PreconditionError(fmt::format("m schedule has no entry for level {}", n));
        m = params_.m_schedule[n - 1];
        if (m % 4 != 1 || m < 5) throw PreconditionError(fmt::format("m_{} = {} is not in 4N+1 with m >= 5", n, m));
        if (m > L) throw DepthError(fmt::format("depth insufficient: m_{} = {} exceeds level length {}", n, m, L));
    } else if (params_.geometric) {
        unsigned long p = 1;
        for (std::size_t k = 0; k < n; ++k)
            p *= 5;
        m = 4 * p + 1;
        if (m > L) throw DepthError(fmt::format("depth insufficient: m_{} = {} exceeds level length {}", n, m, L));
    } else {
        for (std::size_t cand = 5; cand <= L; cand += 4) {
            if (admissible(cand)) {
                m = cand;
                break;
            }
        }
        if (!m)
            throw DepthError(fmt::format("depth insufficient: no admissible link m_{} within level length {}", n, L));
    }
    std::size_t stored = 0;
    for (const auto& lev : ladder_.levels)
        stored += lev.size();
    if (stored + next_level_length(L, m) > kMaxStoredRadii)
        throw CapacityError(fmt::format("capacity exhausted: level {} would bring the ladder past {} stored radii; "
                                        "set max_level_length or reduce the depth",
                                        n + 1, kMaxStoredRadii));
    ladder_.levels.push_back(next_level(cur, m, params_.split_low, params_.split_high));
    ladder_.links.push_back(m);
    return m;
}

RadiiLadder build_ladder(const LadderParams& params)
{
    LadderBuilder b(params);
    while (b.depth() < params.depth)
        b.extend();
    RadiiLadder L = b.ladder();
    if (params.base_kind == BaseKind::odometer_dyadic) allocate_exponents(L, params);
    return L;
}

RadiiLadder build_ladder(BaseKind kind, std::size_t depth, std::size_t level_length,
                         const std::vector<std::size_t>& m_schedule)
{
    LadderParams p;
    p.base_kind = kind;
    p.depth = depth;
    p.level_length = level_length;
    p.m_schedule = m_schedule;
    return build_ladder(p);
}

std::optional<unsigned long> dyadic_exponent(const Rational& r)
{
    if (r.get_num() != 1) return std::nullopt;
    const Integer& q = r.get_den();
    if (mpz_popcount(q.get_mpz_t()) != 1) return std::nullopt;
    return mpz_sizeinbase(q.get_mpz_t(), 2) - 1;
}

std::vector<Violation> validate_ladder(const RadiiLadder& L, const BaseSystem& sys)
{
    std::vector<Violation> out;
    auto add = [&](std::string rule, std::size_t n, std::size_t i, std::string detail) {
        out.push_back({std::move(rule), n, i, std::move(detail)});
    };
    const bool odo = L.base_kind == BaseKind::odometer_dyadic;
    if (odo != sys.is_odometer()) add("kind", 0, 0, "ladder base kind does not match the base system");
    if (L.levels.empty()) {
        add("R1", 0, 0, "ladder has no levels");
        return out;
    }
    if (L.links.size() + 1 != L.levels.size())
        add("R2", 0, 0, fmt::format("{} links for {} levels", L.links.size(), L.levels.size()));

    const Rational half(1, 2);
    Rational bound = 1;
    for (std::size_t n = 1; n <= L.depth(); ++n) {
        const auto& lev = L.level(n);
        bound *= L.tail_ratio;
        if (lev.empty()) {
            add("R1", n, 0, "empty level");
            continue;
        }
        for (std::size_t i = 1; i <= lev.size(); ++i) {
            const Rational& r = lev[i - 1];
            if (sgn(r) <= 0 || r > half) add("R1", n, i, "radius outside (0, 1/2]");
            if (i > 1 && !(r < lev[i - 2])) add("R1", n, i, "not strictly below the previous radius");
            if (odo && !dyadic_exponent(r)) add("R5'", n, i, "radius is not a power of 1/2");
        }
        if (lev.front() > bound) add("R0", n, 1, "tail bound r_1^n <= ratio^n violated");
        if (n > 1 && !(lev.front() < L.level(n - 1).front())) add("R0", n, 1, "r_1^n not strictly decreasing in n");
        // R4 (the designated centre suffices by homogeneity)
        for (std::size_t i = 1; i < lev.size(); ++i) {
            if (!(sgn(lev[i]) > 0 && lev[i] < lev[i - 1] && lev[i - 1] <= half)) continue;
            if (ball_compare(sys, sys.theta(), ExactScalar(lev[i - 1]), ExactScalar(lev[i])) !=
                BallRelation::strictly_larger)
                add("R4", n, i, "B(r_i) minus cl B(r_{i+1}) is empty");
        }
    }

    auto desc = [](const Rational& a, const Rational& b) { return a > b; };
    for (std::size_t n = 1; n < L.depth() && n <= L.links.size(); ++n) {
        const auto& cur = L.level(n);
        const auto& nxt = L.level(n + 1);
        std::size_t m = L.links[n - 1];
        if (m % 4 != 1) add("R2", n, m, "m_n not in 4N+1");
        if (m < 1 || m > cur.size()) {
            add("R2", n, m, "m_n outside level");
            continue;
        }
        if (nxt.empty() || nxt.front() != cur[m - 1]) add("R2", n + 1, 1, "r_1^{n+1} differs from r_{m_n}^n");
        // nesting: the tail from m_n reappears in level n+1
        for (std::size_t i = m; i <= cur.size(); ++i)
            if (!std::binary_search(nxt.begin(), nxt.end(), cur[i - 1], desc))
                add("nesting", n, i, "tail radius missing from the next level");
        // interleaving rule
        for (std::size_t j = 1; j <= nxt.size(); ++j) {
            if (j % 4 != 1 && j % 4 != 2) continue;
            auto it = std::lower_bound(cur.begin(), cur.end(), nxt[j - 1], desc);
            if (it == cur.end() || *it != nxt[j - 1]) continue;  // the rule only constrains inherited radii
            std::size_t i = static_cast<std::size_t>(it - cur.begin()) + 1;
            if (i >= cur.size()) continue;
            std::size_t jj = j % 4 == 1 ? j + 1 : j + 3;
            if (jj > nxt.size() || nxt[jj - 1] != cur[i])
                add("R3", n + 1, j, fmt::format("r_{}^{{n+1}} should equal r_{}^n", jj, i + 1));
        }
    }
    return out;
}

}  // namespace semico
