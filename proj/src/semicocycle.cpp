#include "semico/semicocycle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "semico/errors.hpp"

namespace semico {

std::string to_string(Construction c) { return c == Construction::tame_nonnull ? "tame_nonnull" : "nontame"; }

Construction construction_from_string(const std::string& s)
{
    if (s == "tame_nonnull") return Construction::tame_nonnull;
    if (s == "nontame") return Construction::nontame;
    throw ConfigError(fmt::format("unknown construction '{}'", s));
}

namespace {

constexpr double kSlack = 1e-9;

double circ(double x)
{
    x -= std::floor(x);
    return std::min(x, 1.0 - x);
}

ExactScalar S(const Rational& r) { return ExactScalar(r); }

// approx >= 0 when clearly so, otherwise asks the exact predicate
template <class F>
bool sure_ge(double approx, F exact)
{
    if (approx > kSlack) return true;
    if (approx < -kSlack) return false;
    return exact();
}

const CirclePoint& cp(const Point& p) { return std::get<CirclePoint>(p); }
const OdometerPoint& op(const Point& p) { return std::get<OdometerPoint>(p); }

struct Candidate {
    long k;
    double pos;  // approximate position of theta + k alpha
    double d;    // approximate rho(k alpha, 0)
};

std::vector<Candidate> rotation_candidates(const BaseSystem& sys, long bound)
{
    if (bound < 1) throw PreconditionError("anchor candidate bound must be positive");
    double t = cp(sys.theta()).value().to_double();
    std::vector<Candidate> out;
    out.reserve(2 * static_cast<std::size_t>(bound));
    for (long k = 1; k <= bound; ++k) {
        double p = (ExactScalar(k) * sys.alpha()).frac().to_double();
        double d = std::min(p, 1.0 - p);
        out.push_back({k, t + p - std::floor(t + p), d});
        out.push_back({-k, t - p - std::floor(t - p), d});
    }
    // rho(k alpha) = rho(-k alpha); the positive k goes first
    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (std::labs(a.k) != std::labs(b.k)) return a.d > b.d;
        return a.k > b.k;
    });
    return out;
}

struct RotationAnchorPicker {
    const BaseSystem& sys;
    std::vector<Candidate> cands;
    std::vector<std::size_t> chosen;   // indices into cands
    std::vector<Point> centres;
    std::vector<ExactScalar> radii;    // exclusion radius of each chosen ball
    std::size_t next = 0;

    Point centre(std::size_t i) const { return act(sys, GroupElement(cands[i].k), sys.theta()); }

    bool disjoint_from_chosen(std::size_t i, const Point& c, const ExactScalar& rad) const
    {
        for (std::size_t j = 0; j < chosen.size(); ++j) {
            double gap = circ(cands[i].pos - cands[chosen[j]].pos) - (rad.to_double() + radii[j].to_double());
            if (!sure_ge(gap, [&] { return dist(sys, c, centres[j]) >= rad + radii[j]; })) return false;
        }
        return true;
    }

    void commit(std::size_t i, const ExactScalar& rad)
    {
        chosen.push_back(i);
        centres.push_back(centre(i));
        radii.push_back(rad);
        next = i + 1;
    }
};

std::vector<unsigned long> level_tops_exponents(const RadiiLadder& L)
{
    std::vector<unsigned long> e;
    for (std::size_t n = 1; n <= L.depth(); ++n) {
        auto x = dyadic_exponent(L.r(n, 1));
        if (!x) throw PreconditionError("odometer ladder radius is not a power of 1/2");
        e.push_back(*x);
    }
    return e;
}

unsigned long max_exponent(const RadiiLadder& L)
{
    unsigned long m = 0;
    for (const auto& lev : L.levels) {
        auto x = dyadic_exponent(lev.back());
        if (!x) throw PreconditionError("odometer ladder radius is not a power of 1/2");
        m = std::max(m, *x);
    }
    return m;
}

void require_kind(const BaseSystem& sys, const LadderParams& lp)
{
    bool odo = lp.base_kind == BaseKind::odometer_dyadic;
    if (odo != sys.is_odometer()) throw PreconditionError("ladder base kind does not match the base system");
}

}  // namespace

void prepare(SemicocycleInstance& inst)
{
    const std::size_t D = inst.ladder.depth();
    if (inst.anchors.g.size() != D + 1)
        throw PreconditionError(fmt::format("instance has {} anchors for ladder depth {}", inst.anchors.count(), D));
    inst.centres.clear();
    inst.centre_x.clear();
    inst.top_x.assign(D + 1, 0.0);
    for (std::size_t n = 0; n <= D; ++n)
        inst.centres.push_back(act(inst.sys, inst.anchors.g[n], inst.anchors.theta));
    if (inst.sys.is_rotation())
        for (const auto& c : inst.centres)
            inst.centre_x.push_back(cp(c).value().to_double());
    for (std::size_t n = 1; n <= D; ++n)
        inst.top_x[n] = inst.ladder.r(n, 1).get_d();
    inst.block_of.assign(D + 1, 0);
    if (inst.construction == Construction::tame_nonnull)
        for (std::size_t s = 1; s <= inst.blocks.size(); ++s)
            for (std::size_t n = block_alpha(s) + 1; n <= block_alpha(s + 1) && n <= D; ++n)
                inst.block_of[n] = static_cast<int>(s);
}

SemicocycleInstance build_tame_nonnull(const BaseSystem& sys_in, const LadderParams& lp, ProfileVariant v,
                                       std::size_t s_max, const AnchorSearch& search)
{
    require_kind(sys_in, lp);
    if (s_max < 1) throw PreconditionError("s_max must be at least 1");
    if (lp.depth < block_alpha(s_max + 1))
        throw DepthError(fmt::format("depth insufficient: s_max = {} needs ladder depth {}, got {}", s_max,
                                     block_alpha(s_max + 1), lp.depth));
    SemicocycleInstance inst;
    inst.construction = Construction::tame_nonnull;
    inst.variant = v;
    inst.s_max = s_max;

    if (sys_in.is_rotation()) {
        inst.sys = sys_in;
        RotationAnchorPicker pick{inst.sys, rotation_candidates(inst.sys, search.candidate_bound), {}, {}, {}, 0};
        // largest admissible distance below the previous anchor, ball radius r_1^n, theta kept outside
        auto find = [&](const Rational& top) -> std::optional<std::size_t> {
            ExactScalar rad = S(top);
            double tx = top.get_d();
            for (std::size_t i = pick.next; i < pick.cands.size(); ++i) {
                const Candidate& c = pick.cands[i];
                if (!pick.chosen.empty() && std::labs(c.k) == std::labs(pick.cands[pick.chosen.back()].k)) continue;
                Point ci = pick.centre(i);
                if (!sure_ge(c.d - tx, [&] { return dist(inst.sys, ci, inst.sys.theta()) >= rad; })) return std::nullopt;
                if (pick.disjoint_from_chosen(i, ci, rad)) return i;
            }
            return std::nullopt;
        };
        LadderBuilder builder(lp);
        auto first = find(builder.ladder().r(1, 1));
        if (!first) throw SearchError("anchor search failed; raise bound");
        pick.commit(*first, S(builder.ladder().r(1, 1)));
        while (builder.depth() < lp.depth) {
            std::optional<std::size_t> found;
            builder.extend([&](std::size_t, std::size_t, const Rational& top) {
                found = find(top);
                return found.has_value();
            });
            pick.commit(*found, S(builder.ladder().r(builder.depth(), 1)));
        }
        inst.ladder = builder.ladder();
        inst.anchors.theta = inst.sys.theta();
        inst.anchors.g.push_back(0);
        for (auto i : pick.chosen)
            inst.anchors.g.emplace_back(pick.cands[i].k);
    } else {
        inst.ladder = build_ladder(lp);
        inst.sys = sys_in.with_depth(max_exponent(inst.ladder) + search.digit_margin);
        inst.anchors.theta = inst.sys.theta();
        inst.anchors.g.push_back(0);
        // g_n = n_{e_n - 1} sits at distance exactly r_1^n = 2^{-e_n} from theta
        for (auto e : level_tops_exponents(inst.ladder))
            inst.anchors.g.push_back(inst.sys.scale().modulus(e - 1));
    }
    for (std::size_t s = 1; s <= s_max; ++s)
        inst.blocks.push_back(block_layout(inst.ladder, v, s));
    prepare(inst);
    auto problems = check_instance(inst);
    if (!problems.empty()) throw std::logic_error("constructed instance violates: " + problems.front());
    return inst;
}

SemicocycleInstance build_nontame(const BaseSystem& sys_in, const LadderParams& lp, ProfileVariant v,
                                  const AnchorSearch& search)
{
    require_kind(sys_in, lp);
    SemicocycleInstance inst;
    inst.construction = Construction::nontame;
    inst.variant = v;

    if (sys_in.is_rotation()) {
        inst.sys = sys_in;
        const Point& theta = inst.sys.theta();
        // theta' = theta + K alpha, K in 1..64 maximizing rho(theta, theta')
        long K = 1;
        ExactScalar best = dist(inst.sys, theta, act(inst.sys, 1, theta));
        for (long k = 2; k <= std::min<long>(64, search.candidate_bound); ++k) {
            ExactScalar d = dist(inst.sys, theta, act(inst.sys, k, theta));
            if (d > best) {
                best = d;
                K = k;
            }
        }
        Point theta_p = act(inst.sys, K, theta);
        ExactScalar r = best / ExactScalar(3);
        double rx = r.to_double();

        RotationAnchorPicker pick{inst.sys, rotation_candidates(inst.sys, search.candidate_bound), {}, {}, {}, 0};
        LadderBuilder builder(lp);
        const Rational& r11 = builder.ladder().r(1, 1);
        const ExactScalar two_r11 = S(2 * r11);

        // g_1: rho(g_1 theta, theta) in (2 r_1^1, r - r_1^1)
        std::optional<std::size_t> g1;
        for (std::size_t i = 0; i < pick.cands.size() && !g1; ++i) {
            const Candidate& c = pick.cands[i];
            if (c.d + r11.get_d() >= rx + kSlack) continue;
            if (c.d <= 2 * r11.get_d() + kSlack) break;
            Point ci = pick.centre(i);
            ExactScalar d = dist(inst.sys, ci, theta);
            if (d + S(r11) < r && d > two_r11) g1 = i;
        }
        if (!g1) throw SearchError("anchor search failed; raise bound");
        pick.commit(*g1, two_r11);
        const Point g1c = pick.centres.front();
        const double g1x = pick.cands[*g1].pos;

        // g_n (n >= 2): ball radius 2 r_1^{n-1}, cl B_{r_1^n}(g_n) inside B_r(theta) and B_r(g_1 theta)
        auto find = [&](const Rational& prev_top, const Rational& top) -> std::optional<std::size_t> {
            ExactScalar rad = S(2 * prev_top);
            ExactScalar t = S(top);
            double tx = top.get_d();
            for (std::size_t i = pick.next; i < pick.cands.size(); ++i) {
                const Candidate& c = pick.cands[i];
                if (std::labs(c.k) == std::labs(pick.cands[pick.chosen.back()].k)) continue;
                if (c.d + tx >= rx + kSlack) continue;
                if (circ(c.pos - g1x) + tx >= rx + kSlack) continue;
                Point ci = pick.centre(i);
                if (!(dist(inst.sys, ci, theta) + t < r) || !(dist(inst.sys, ci, g1c) + t < r)) continue;
                if (pick.disjoint_from_chosen(i, ci, rad)) return i;
            }
            return std::nullopt;
        };
        while (builder.depth() < lp.depth) {
            Rational prev_top = builder.ladder().r(builder.depth(), 1);
            std::optional<std::size_t> found;
            builder.extend([&](std::size_t, std::size_t, const Rational& top) {
                found = find(prev_top, top);
                return found.has_value();
            });
            pick.commit(*found, S(2 * prev_top));
        }
        inst.ladder = builder.ladder();
        inst.anchors.theta = theta;
        inst.anchors.theta_prime = theta_p;
        inst.anchors.r = r;
        inst.anchors.g.push_back(0);
        for (auto i : pick.chosen)
            inst.anchors.g.emplace_back(pick.cands[i].k);
    } else {
        inst.ladder = build_ladder(lp);
        inst.sys = sys_in.with_depth(max_exponent(inst.ladder) + search.digit_margin);
        auto e = level_tops_exponents(inst.ladder);
        // theta' = 1 at distance 1/2, r = 1/6, g_1 = n_2 at distance 1/8; g_n = n_{e_{n-1} - 2}
        if (e.front() < 5)
            throw SearchError(fmt::format("anchor search failed; raise bound: r_1^1 = 2^-{} must be at most 2^-5",
                                          e.front()));
        inst.anchors.theta = inst.sys.theta();
        inst.anchors.theta_prime = inst.sys.odometer_integer(1);
        inst.anchors.r = ExactScalar(make_rational(1, 6));
        inst.anchors.g.push_back(0);
        inst.anchors.g.push_back(inst.sys.scale().modulus(2));
        for (std::size_t n = 2; n <= inst.ladder.depth(); ++n)
            inst.anchors.g.push_back(inst.sys.scale().modulus(e[n - 2] - 2));
    }
    prepare(inst);
    auto problems = check_instance(inst);
    if (!problems.empty()) throw std::logic_error("constructed instance violates: " + problems.front());
    return inst;
}

std::pair<Rational, Rational> residue_key(const ExactScalar& alpha, const ExactScalar& x)
{
    auto reduce = [](const Rational& a) { return Rational(a - Rational(floor_rational(a))); };
    if (x.is_rational()) return {reduce(x.rational_part()), Rational(0)};
    if (alpha.is_rational() || alpha.discriminant() != x.discriminant()) return {reduce(x.rational_part()), x.surd_part()};
    Rational k = x.surd_part() / alpha.surd_part();
    Integer fk = floor_rational(k);
    Rational a = x.rational_part() - Rational(fk) * alpha.rational_part();
    Rational b = x.surd_part() - Rational(fk) * alpha.surd_part();
    return {reduce(a), b};
}

std::optional<Integer> odometer_value(const BaseSystem& sys, const OdometerPoint& p)
{
    if (p.tail == Tail::opaque) return std::nullopt;
    Integer v = 0, n = 1;
    for (std::size_t k = 0; k < p.digits.size(); ++k) {
        v += n * p.digits[k];
        n *= sys.scale().ratio(k + 1);
    }
    if (p.tail == Tail::max) v -= n;
    return v;
}

namespace {

// x's digits from position j+1 on rule out every integer m with |m| < n_j
bool odometer_not_small_integer(const BaseSystem& sys, const OdometerPoint& x, std::size_t j)
{
    bool nonzero = false, nonmax = false;
    for (std::size_t k = j; k < x.digits.size(); ++k) {
        if (x.digits[k] != 0) nonzero = true;
        if (x.digits[k] != sys.scale().ratio(k + 1) - 1) nonmax = true;
    }
    return nonzero && nonmax;
}

std::vector<std::pair<std::size_t, ExactScalar>> ball_radii(const SemicocycleInstance& inst)
{
    // the disjoint family (exclusion radius per anchor)
    std::vector<std::pair<std::size_t, ExactScalar>> out;
    const auto& L = inst.ladder;
    for (std::size_t n = 1; n <= L.depth(); ++n) {
        if (inst.construction == Construction::tame_nonnull)
            out.emplace_back(n, S(L.r(n, 1)));
        else
            out.emplace_back(n, S(2 * L.r(n == 1 ? 1 : n - 1, 1)));
    }
    return out;
}

}  // namespace

std::vector<std::string> check_instance(const SemicocycleInstance& inst)
{
    std::vector<std::string> bad;
    const auto& sys = inst.sys;
    const auto& A = inst.anchors;
    const std::size_t D = inst.ladder.depth();
    auto add = [&](std::string s) { bad.push_back(std::move(s)); };
    if (A.g.size() != D + 1 || A.g.front() != 0) {
        add("anchor sequence must start with the identity and have one anchor per level");
        return bad;
    }
    if (inst.centres.size() != D + 1) {
        add("instance not prepared");
        return bad;
    }
    const Point& theta = A.theta;
    // distinct anchors converging monotonically
    ExactScalar prev(2);
    for (std::size_t n = 1; n <= D; ++n) {
        ExactScalar d = dist(sys, inst.centres[n], theta);
        if (d.sign() == 0) add(fmt::format("g_{} theta equals theta", n));
        if (!(d < prev)) add(fmt::format("rho(g_{} theta, theta) not strictly decreasing", n));
        prev = d;
    }
    auto radii = ball_radii(inst);
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (std::size_t j = i + 1; j < radii.size(); ++j) {
            auto [n, rn] = radii[i];
            auto [m, rm] = radii[j];
            if (!balls_disjoint(sys, inst.centres[n], rn, inst.centres[m], rm))
                add(fmt::format("balls around g_{} and g_{} intersect", n, m));
        }
    if (inst.construction == Construction::tame_nonnull) {
        for (std::size_t n = 1; n <= D; ++n)
            if (in_open_ball(sys, theta, inst.centres[n], S(inst.ladder.r(n, 1))))
                add(fmt::format("theta lies in B(g_{} theta, r_1^{})", n, n));
        if (inst.blocks.size() != inst.s_max) add("block layouts missing");
        if (D < block_alpha(inst.s_max + 1)) add("ladder shallower than alpha(s_max + 1)");
    } else {
        if (!A.theta_prime || !A.r) {
            add("non-tame instance needs theta' and r");
            return bad;
        }
        const Point& tp = *A.theta_prime;
        const ExactScalar& r = *A.r;
        if (!(dist(sys, theta, tp) > ExactScalar(2) * r)) add("rho(theta, theta') <= 2r");
        if (sys.is_rotation()) {
            if (residue_key(sys.alpha(), cp(tp).value() - cp(theta).value()) != std::pair<Rational, Rational>{})
                add("theta' not in the orbit of theta");
        } else if (!odometer_value(sys, op(tp)) || !odometer_value(sys, op(theta))) {
            add("theta' not in the orbit of theta");
        }
        const Point& g1 = inst.centres[1];
        if (!in_open_ball(sys, g1, theta, r) || dist(sys, g1, theta).sign() == 0) add("g_1 theta not in B_r(theta) minus theta");
        Point g1tp = act(sys, A.g[1], tp);
        if (!(dist(sys, tp, g1tp) > S(2 * inst.ladder.r(1, 1)))) add("rho(theta', g_1 theta') <= 2 r_1^1");
        for (std::size_t n = 1; n <= D; ++n) {
            ExactScalar t = S(inst.ladder.r(n, 1));
            if (!closed_ball_inside(sys, inst.centres[n], t, theta, r) || !closed_ball_inside(sys, inst.centres[n], t, g1, r))
                add(fmt::format("cl B(g_{} theta, r_1^{}) leaves B_r(theta) and B_r(g_1 theta)", n, n));
            if (!balls_disjoint(sys, tp, S(inst.ladder.r(1, 1)), inst.centres[n], t))
                add(fmt::format("B(theta', r_1^1) meets B(g_{} theta, r_1^{})", n, n));
        }
    }
    // theta0 off the orbit of theta (which contains every anchor)
    if (sys.is_rotation()) {
        ExactScalar delta = cp(sys.theta0()).value() - cp(theta).value();
        if (residue_key(sys.alpha(), delta) == std::pair<Rational, Rational>{}) add("theta0 lies on the orbit of theta");
        if (inst.variant == ProfileVariant::binary) {
            auto d = discontinuities(inst);
            for (const auto& sf : d.spheres) {
                if (residue_key(sys.alpha(), delta - S(sf.radius)) == std::pair<Rational, Rational>{} ||
                    residue_key(sys.alpha(), delta + S(sf.radius)) == std::pair<Rational, Rational>{}) {
                    add(fmt::format("theta0 orbit meets the sphere of radius {} around anchor {}", to_string(sf.radius),
                                    sf.anchor));
                    break;
                }
            }
        }
    } else {
        const auto& t0 = op(sys.theta0());
        if (t0.tail != Tail::opaque || !odometer_not_small_integer(sys, t0, t0.digits.size() / 2))
            add("theta0 not separated from the integer orbit at stored depth");
    }
    return bad;
}

Evaluation evaluate_detail(const SemicocycleInstance& inst, const Point& w)
{
    Evaluation e;
    const auto& L = inst.ladder;
    const bool rot = inst.sys.is_rotation();
    const bool tame = inst.construction == Construction::tame_nonnull;
    const double wx = rot ? cp(w).value().to_double() : 0.0;

    // distance to a centre when it may be below `top`; nullopt when clearly >= top
    auto near = [&](const Point& c, double cx, double top) -> std::optional<ExactScalar> {
        if (rot) {
            if (circ(wx - cx) >= top + kSlack) return std::nullopt;
            return circle_dist(cp(w), cp(c));
        }
        auto k = first_disagreement(op(w), op(c));
        if (!k) return ExactScalar(0);
        Rational d = pow2_inv(*k);
        if (d >= Rational(top)) return std::nullopt;  // top is exact for odometer radii
        return ExactScalar(d);
    };
    auto is_theta = [&](const Point& c, double cx) {
        if (rot) return circ(wx - cx) < kSlack && cp(w) == cp(c);
        return !first_disagreement(op(w), op(c)).has_value();
    };

    if (is_theta(inst.centres[0], rot ? inst.centre_x[0] : 0.0)) {
        e.on_theta_set = true;
        e.value = 0;
        return e;
    }
    auto summand = [&](std::size_t n, const ExactScalar& rho) -> ExactScalar {
        if (rho.sign() == 0) return 0;
        if (!tame) return eval_profile(L, inst.variant, n, rho);
        int s = inst.block_of[n];
        if (!s) return 0;
        return eval_bar(L, inst.variant, inst.blocks[s - 1], n, rho);
    };
    for (std::size_t n = 1; n <= L.depth(); ++n) {
        double cx = rot ? inst.centre_x[n] : 0.0;
        double top = rot ? inst.top_x[n] : 0.0;
        std::optional<ExactScalar> rho;
        if (rot) {
            rho = near(inst.centres[n], cx, top);
        } else {
            auto k = first_disagreement(op(w), op(inst.centres[n]));
            if (!k)
                rho = ExactScalar(0);
            else if (pow2_inv(*k) < L.r(n, 1))
                rho = ExactScalar(pow2_inv(*k));
        }
        if (!rho) continue;
        if (rho->sign() == 0 && !tame) {
            e.on_theta_set = true;
            e.active.clear();
            e.value = 0;
            return e;
        }
        ExactScalar v = summand(n, *rho);
        if (v.sign() != 0) e.active.emplace_back(n, v);
    }
    if (!tame) {
        const Point& tp = *inst.anchors.theta_prime;
        std::optional<ExactScalar> rho;
        if (rot) {
            double tx = cp(tp).value().to_double();
            rho = near(tp, tx, inst.top_x[1]);
        } else {
            auto k = first_disagreement(op(w), op(tp));
            if (!k)
                rho = ExactScalar(0);
            else if (pow2_inv(*k) < L.r(1, 1))
                rho = ExactScalar(pow2_inv(*k));
        }
        if (rho && rho->sign() == 0) {
            e.on_theta_set = true;
            e.active.clear();
            e.value = 0;
            return e;
        }
        if (rho) {
            ExactScalar v = eval_profile(L, inst.variant, 1, *rho);
            if (v.sign() != 0) e.active.emplace_back(0, v);
        }
    }
    e.value = 0;
    for (const auto& [n, v] : e.active)
        e.value += v;
    return e;
}

ExactScalar value_at(const SemicocycleInstance& inst, const Point& w)
{
    Evaluation e = evaluate_detail(inst, w);
    if (e.active.size() > 1)
        throw std::logic_error(fmt::format("invariant violated: {} summands active at {}", e.active.size(), describe(w)));
    if (e.value.sign() < 0 || e.value > Rational(1))
        throw std::logic_error("invariant violated: value outside [0,1]");
    if (inst.variant == ProfileVariant::binary && e.value.sign() != 0 && e.value != Rational(1))
        throw std::logic_error("invariant violated: binary value outside {0,1}");
    return e.value;
}

ExactScalar evaluate(const SemicocycleInstance& inst, const GroupElement& h)
{
    return value_at(inst, act(inst.sys, h, inst.sys.theta0()));
}

Word word(const SemicocycleInstance& inst, const std::vector<GroupElement>& window, const GroupElement& shift)
{
    Word out;
    out.reserve(window.size());
    for (const auto& g : window)
        out.emplace_back(g, evaluate(inst, g + shift));
    return out;
}

std::vector<GroupElement> window_range(long long a, long long b)
{
    if (a > b) throw PreconditionError(fmt::format("empty window {}:{}", a, b));
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(b - a + 1));
    for (long long g = a; g <= b; ++g)
        out.emplace_back(static_cast<long>(g));
    return out;
}

DiscontinuityDescriptor discontinuities(const SemicocycleInstance& inst)
{
    DiscontinuityDescriptor d;
    const bool tame = inst.construction == Construction::tame_nonnull;
    d.points.push_back(inst.centres[0]);
    d.point_anchor.push_back(0);
    if (!tame) {
        for (std::size_t n = 1; n < inst.centres.size(); ++n) {
            d.points.push_back(inst.centres[n]);
            d.point_anchor.push_back(n);
        }
        d.points.push_back(*inst.anchors.theta_prime);
        d.point_anchor.push_back(DiscontinuityDescriptor::npos);
    }
    // odometer balls are clopen, so only rotation binary profiles add spheres
    if (inst.sys.is_rotation() && inst.variant == ProfileVariant::binary) {
        const auto& L = inst.ladder;
        auto add_level = [&](std::size_t anchor, std::size_t n, const BlockLayout* J) {
            const auto& R = L.level(n);
            for (std::size_t j = 2; j + 1 <= R.size(); j += 4)
                for (std::size_t i : {j, j + 1}) {
                    const Rational& r = R[i - 1];
                    if (J && (r < J->lo || r > J->hi)) continue;
                    d.spheres.push_back({anchor, n, i, r});
                }
        };
        for (std::size_t n = 1; n <= L.depth(); ++n) {
            if (tame) {
                int s = inst.block_of[n];
                if (s) add_level(n, n, &inst.blocks[s - 1]);
            } else {
                add_level(n, n, nullptr);
            }
        }
        if (!tame) add_level(0, 1, nullptr);
    }
    d.finite = tame && d.spheres.empty();
    return d;
}

bool is_discontinuity(const SemicocycleInstance& inst, const DiscontinuityDescriptor& d, const Point& x)
{
    for (const auto& p : d.points)
        if (dist(inst.sys, x, p).sign() == 0) return true;
    for (const auto& sf : d.spheres) {
        const Point& c = sf.anchor == 0 ? *inst.anchors.theta_prime : inst.centres[sf.anchor];
        if (dist(inst.sys, x, c) == sf.radius) return true;
    }
    return false;
}

bool in_prefix_shadow(const DiscontinuityDescriptor& d, const OdometerPoint& x, std::size_t k)
{
    for (const auto& p : d.points) {
        const auto& q = op(p);
        if (k > x.digits.size() || k > q.digits.size())
            throw DepthError(fmt::format("insufficient depth: prefix length {} exceeds stored digits", k));
        if (std::equal(x.digits.begin(), x.digits.begin() + static_cast<long>(k), q.digits.begin())) return true;
    }
    return false;
}

std::vector<OrbitHit> orbit_hits(const SemicocycleInstance& inst, const DiscontinuityDescriptor& d, const Point& base,
                                 const GroupElement& h0, const GroupElement& count)
{
    std::vector<OrbitHit> hits;
    if (count <= 0) return hits;
    const GroupElement h1 = h0 + count;  // exclusive
    auto in_window = [&](const Integer& h) { return h >= h0 && h < h1; };

    if (inst.sys.is_rotation()) {
        const ExactScalar& alpha = inst.sys.alpha();
        const ExactScalar x0 = cp(base).value();
        // x0 + h alpha = c (mod 1) forces h = surd(c - x0) / surd(alpha); returns h and the
        // rational residue q = h alpha - (c - x0), which must be an integer
        auto solve = [&](const ExactScalar& c) -> std::optional<std::pair<Integer, Rational>> {
            ExactScalar diff = c - x0;
            if (!diff.is_rational() && diff.discriminant() != alpha.discriminant()) return std::nullopt;
            Rational hq = diff.surd_part() / alpha.surd_part();
            if (hq.get_den() != 1) return std::nullopt;
            Integer h = hq.get_num();
            Rational q = Rational(h) * alpha.rational_part() - diff.rational_part();
            return std::pair<Integer, Rational>{h, q};
        };
        for (std::size_t i = 0; i < d.points.size(); ++i) {
            auto s = solve(cp(d.points[i]).value());
            if (s && s->second.get_den() == 1 && in_window(s->first)) hits.push_back({s->first, d.point_anchor[i], {}, 0});
        }
        // spheres: group per centre, since h only depends on the centre
        std::size_t i = 0;
        while (i < d.spheres.size()) {
            std::size_t anchor = d.spheres[i].anchor;
            std::size_t j = i;
            while (j < d.spheres.size() && d.spheres[j].anchor == anchor)
                ++j;
            const Point& c = anchor == 0 ? *inst.anchors.theta_prime : inst.centres[anchor];
            auto s = solve(cp(c).value());
            if (s && in_window(s->first)) {
                // need +-r = q (mod 1)
                Rational qp = s->second - Rational(floor_rational(s->second));
                Rational qm = Rational(1) - qp;
                for (std::size_t k = i; k < j; ++k) {
                    if (d.spheres[k].radius == qp) hits.push_back({s->first, anchor, k, +1});
                    if (d.spheres[k].radius == qm) hits.push_back({s->first, anchor, k, -1});
                }
            }
            i = j;
        }
        return hits;
    }

    const auto& x = op(base);
    auto xv = odometer_value(inst.sys, x);
    for (std::size_t i = 0; i < d.points.size(); ++i) {
        auto pv = odometer_value(inst.sys, op(d.points[i]));
        if (!pv) throw PreconditionError("odometer discontinuity points must be integer points");
        if (xv) {
            Integer h = *pv - *xv;
            if (in_window(h)) hits.push_back({h, d.point_anchor[i], {}, 0});
            continue;
        }
        // x = p - h would make x an integer of size below M
        Integer m1 = *pv - h0, m2 = *pv - (h1 - 1);
        Integer M = (abs(m1) > abs(m2) ? abs(m1) : abs(m2)) + 1;
        std::size_t j = 0;
        while (j < x.digits.size() && inst.sys.scale().modulus(j) <= M)
            ++j;
        if (j >= x.digits.size() || !odometer_not_small_integer(inst.sys, x, j))
            throw DepthError("insufficient depth: orbit incidence undecidable at stored depth");
    }
    return hits;
}

OrbitHitReport orbit_hits(const SemicocycleInstance& inst, const GroupElement& h0, const GroupElement& count)
{
    auto d = discontinuities(inst);
    OrbitHitReport rep;
    rep.theta0 = orbit_hits(inst, d, inst.sys.theta0(), h0, count);
    rep.theta = orbit_hits(inst, d, inst.anchors.theta, h0, count);
    if (inst.anchors.theta_prime) rep.theta_prime = orbit_hits(inst, d, *inst.anchors.theta_prime, h0, count);
    return rep;
}

}  // namespace semico
