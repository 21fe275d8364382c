#include "semico/certificates.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "semico/errors.hpp"
#include "semico/orbit_scan.hpp"

namespace semico {

IndependenceQuery default_targets(const std::optional<Rational>& delta)
{
    IndependenceQuery q;
    if (delta) {
        if (!(sgn(*delta) >= 0 && *delta < Rational(1, 2))) throw PreconditionError("delta must lie in [0, 1/2)");
        q.v0 = {Rational(0), *delta};
        q.v1 = {Rational(1) - *delta, Rational(1)};
    }
    return q;
}

namespace {

// h with rho(h . theta0, theta) = 2^{-t} for the middle exponent t of the cell [lo, hi]
GroupElement digit_witness(const BaseSystem& sys, const OdometerPoint& theta, const Rational& lo, const Rational& hi)
{
    auto e_hi = dyadic_exponent(hi), e_lo = dyadic_exponent(lo);
    if (!e_hi || !e_lo) throw PreconditionError("odometer cell endpoints must be powers of 1/2");
    std::size_t t = *e_hi + (*e_lo - *e_hi) / 2;
    const auto& x0 = std::get<OdometerPoint>(sys.theta0());
    if (t >= x0.digits.size())
        throw DepthError(fmt::format("insufficient depth: witness needs digit {} of {}", t, x0.digits.size()));
    // digits of theta - theta0 below position t, read as an integer in [0, n_{t-1})
    std::vector<std::uint32_t> d(t - 1);
    std::int64_t borrow = 0;
    for (std::size_t k = 0; k + 1 < t; ++k) {
        std::int64_t q = sys.scale().ratio(k + 1);
        std::int64_t v = std::int64_t(theta.digits[k]) - std::int64_t(x0.digits[k]) - borrow;
        borrow = v < 0 ? 1 : 0;
        d[k] = static_cast<std::uint32_t>(v + borrow * q);
    }
    Integer h = 0;
    for (std::size_t k = d.size(); k-- > 0;)
        h = h * sys.scale().ratio(k + 1) + d[k];
    OdometerPoint w = odometer_add(sys, h, x0);
    if (w.digits[t - 1] == theta.digits[t - 1]) h += sys.scale().modulus(t - 1);
    return h;
}

IndependenceCertificate find_certificate(const SemicocycleInstance& inst, std::size_t alpha, std::size_t s,
                                         long long search_bound, const IndependenceQuery& targets)
{
    IndependenceCertificate cert;
    cert.query = targets;
    cert.query.positions.clear();
    for (std::size_t n = alpha + 1; n <= alpha + s; ++n)
        cert.query.positions.push_back(inst.anchors.g[n]);
    if (s == 0) return cert;
    // tame blocks: only cells inside J_s, where bar f_n = f_n
    const auto cells = inst.construction == Construction::tame_nonnull
                           ? inst.blocks.at(s - 1).cells
                           : classify_cells(inst.ladder, inst.variant, alpha, s);
    const std::size_t N = alpha + s;
    const std::size_t patterns = std::size_t(1) << s;
    std::vector<bool> realised(patterns, false);
    for (const auto& c : cells)
        realised[c.bits] = true;
    for (std::uint32_t a = 0; a < patterns; ++a)
        if (!realised[a])
            throw DepthError(fmt::format("depth insufficient: pattern {} has no free interval at level {}",
                                         Pattern{a, s}.key(), N));

    if (inst.sys.is_rotation()) {
        std::vector<DistanceTarget> bands;
        for (const auto& c : cells)
            bands.push_back({inst.ladder.r(N, c.index + 1), inst.ladder.r(N, c.index), c.bits});
        auto hits = scan_distance_targets(inst.sys.alpha(), std::get<CirclePoint>(inst.sys.theta0()).value(),
                                          std::get<CirclePoint>(inst.anchors.theta).value(), bands, patterns,
                                          search_bound);
        for (std::uint32_t a = 0; a < patterns; ++a) {
            if (!hits[a])
                throw SearchError(fmt::format("no witness within bound {} for pattern {}", search_bound,
                                              Pattern{a, s}.key()));
            cert.witnesses[Pattern{a, s}.key()] = GroupElement(static_cast<long>(*hits[a]));
        }
        return cert;
    }
    const auto& theta = std::get<OdometerPoint>(inst.anchors.theta);
    for (std::uint32_t a = 0; a < patterns; ++a) {
        auto it = std::find_if(cells.begin(), cells.end(), [&](const CellPattern& c) { return c.bits == a; });
        cert.witnesses[Pattern{a, s}.key()] =
            digit_witness(inst.sys, theta, inst.ladder.r(N, it->index + 1), inst.ladder.r(N, it->index));
    }
    return cert;
}

}  // namespace

IndependenceCertificate find_nonnull_certificate(const SemicocycleInstance& inst, std::size_t s, long long search_bound,
                                                 const IndependenceQuery& targets)
{
    if (inst.construction != Construction::tame_nonnull)
        throw PreconditionError("non-null certificates need a tame_nonnull instance");
    if (s < 1 || s > inst.s_max) throw PreconditionError(fmt::format("s = {} outside 1..s_max = {}", s, inst.s_max));
    return find_certificate(inst, block_alpha(s), s, search_bound, targets);
}

IndependenceCertificate find_nontame_certificate(const SemicocycleInstance& inst, std::size_t ell,
                                                 long long search_bound, const IndependenceQuery& targets)
{
    if (inst.construction != Construction::nontame)
        throw PreconditionError("non-tame certificates need a nontame instance");
    if (ell > inst.anchors.count())
        throw PreconditionError(fmt::format("ell = {} exceeds the {} anchors", ell, inst.anchors.count()));
    return find_certificate(inst, 0, ell, search_bound, targets);
}

VerificationReport verify_certificate(const SemicocycleInstance& inst, const IndependenceCertificate& cert)
{
    VerificationReport rep;
    const auto& q = cert.query;
    if (q.v0.lo > q.v0.hi || q.v1.lo > q.v1.hi) rep.problems.push_back("empty target set");
    if (!(q.v0.hi < q.v1.lo || q.v1.hi < q.v0.lo)) rep.problems.push_back("target sets V0 and V1 intersect");
    const auto& pos = q.positions;
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (std::size_t j = i + 1; j < pos.size(); ++j)
            if (pos[i] == pos[j]) rep.problems.push_back(fmt::format("positions {} and {} coincide", i + 1, j + 1));
    const std::size_t ell = pos.size();
    if (ell > 24) {
        rep.problems.push_back("too many positions to enumerate patterns");
        return rep;
    }
    for (const auto& [key, h] : cert.witnesses) {
        if (key.size() != ell || key.find_first_not_of("01") != std::string::npos)
            rep.problems.push_back(fmt::format("malformed pattern key '{}'", key));
    }
    if (ell > 0)
        for (std::uint32_t a = 0; a < (std::uint32_t(1) << ell); ++a) {
            std::string key = Pattern{a, ell}.key();
            if (!cert.witnesses.count(key)) rep.problems.push_back(fmt::format("missing witness for pattern {}", key));
        }
    for (const auto& [key, h] : cert.witnesses) {
        if (key.size() != ell) continue;
        for (std::size_t i = 0; i < ell; ++i) {
            const ValueSet& V = key[i] == '1' ? q.v1 : q.v0;
            try {
                ExactScalar v = evaluate(inst, pos[i] + h);
                if (!V.contains(v))
                    rep.failures.push_back({key, i + 1,
                                            fmt::format("f({} + {}) = {} not in V{}", pos[i].get_str(), h.get_str(),
                                                        v.to_string(), key[i])});
            } catch (const std::exception& e) {
                rep.failures.push_back({key, i + 1, fmt::format("evaluation failed: {}", e.what())});
            }
        }
    }
    return rep;
}

TamenessReport tameness_precondition_report(const SemicocycleInstance& inst, const GroupElement& scan_start,
                                            const GroupElement& scan_count)
{
    TamenessReport rep;
    auto d = discontinuities(inst);
    rep.df_finite = d.finite;
    rep.df_points = d.points.size();
    rep.sphere_families = d.spheres.size();
    rep.scan_start = scan_start;
    rep.scan_count = scan_count;
    rep.hits.theta0 = orbit_hits(inst, d, inst.sys.theta0(), scan_start, scan_count);
    rep.hits.theta = orbit_hits(inst, d, inst.anchors.theta, scan_start, scan_count);
    if (inst.anchors.theta_prime)
        rep.hits.theta_prime = orbit_hits(inst, d, *inst.anchors.theta_prime, scan_start, scan_count);
    for (const auto* list : {&rep.hits.theta0, &rep.hits.theta, &rep.hits.theta_prime}) {
        std::map<std::size_t, std::size_t> per;
        for (const auto& h : *list)
            if (h.sphere) ++per[*h.sphere];
        rep.families_hit += per.size();
        for (const auto& [k, c] : per)
            rep.max_hits_per_family = std::max(rep.max_hits_per_family, c);
    }
    if (inst.sys.is_rotation()) {
        rep.family_solution_bound = 2;
        rep.free_action = !inst.sys.alpha().is_rational();
        rep.freeness = "exact: alpha is irrational, so h alpha is an integer only for h = 0";
        std::vector<Rational> radii;
        for (const auto& lev : inst.ladder.levels)
            radii.insert(radii.end(), lev.begin(), lev.end());
        std::sort(radii.begin(), radii.end());
        radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
        std::vector<std::pair<Rational, Rational>> keys;
        keys.reserve(radii.size());
        for (const auto& r : radii)
            keys.push_back(residue_key(inst.sys.alpha(), ExactScalar(r)));
        std::sort(keys.begin(), keys.end());
        rep.residues_disjoint = std::adjacent_find(keys.begin(), keys.end()) == keys.end();
        rep.distinct_radii = radii.size();
    } else {
        // h . x = x needs n_D | h; every scanned shift is below n_D in absolute value
        Integer nD = inst.sys.scale().modulus(inst.sys.depth());
        Integer lo = abs(scan_start), hi = abs(scan_start + scan_count - 1);
        Integer m = lo > hi ? lo : hi;
        rep.free_action = m < nD || sgn(scan_count) <= 0;
        rep.freeness = fmt::format("depth-checked: no shift with 0 < |h| < n_{} fixes a point", inst.sys.depth());
    }
    return rep;
}

std::set<std::string> pattern_census(const SemicocycleInstance& inst, const std::vector<GroupElement>& positions,
                                     long long shift_bound, const ValueSet& v1)
{
    if (positions.size() > 20) throw PreconditionError("pattern census supports at most 20 positions");
    std::set<std::string> out;
    for (long long h = -shift_bound; h <= shift_bound; ++h) {
        std::string key;
        for (const auto& g : positions)
            key.push_back(v1.contains(evaluate(inst, g + GroupElement(static_cast<long>(h)))) ? '1' : '0');
        out.insert(key);
    }
    return out;
}

ToeplitzReport toeplitz_verify(const SemicocycleInstance& inst, long long a, long long b,
                               unsigned long long period_bound)
{
    if (!inst.sys.is_odometer() || inst.variant != ProfileVariant::binary)
        throw PreconditionError("Toeplitz verification needs a binary odometer instance");
    if (a > b) throw PreconditionError("empty window");
    ToeplitzReport rep;
    rep.a = a;
    rep.b = b;
    const std::size_t W = static_cast<std::size_t>(b - a + 1);
    std::vector<unsigned char> eta(W);
    for (std::size_t i = 0; i < W; ++i)
        eta[i] = evaluate(inst, GroupElement(static_cast<long>(a + static_cast<long long>(i)))).sign() != 0;

    for (std::size_t k = 1;; ++k) {
        Integer n = inst.sys.scale().modulus(k);
        if (n > Integer(std::to_string(period_bound))) break;
        rep.moduli.push_back(std::stoull(n.get_str()));
    }
    rep.period.assign(W, 0);
    std::size_t verified = 0;
    for (auto p : rep.moduli) {
        if (p <= W) {
            std::vector<int> first(p, -1);
            std::vector<unsigned char> constant(p, 1);
            std::vector<std::size_t> count(p, 0);
            for (std::size_t i = 0; i < W; ++i) {
                std::size_t c = i % p;
                if (first[c] < 0)
                    first[c] = eta[i];
                else if (first[c] != eta[i])
                    constant[c] = 0;
                ++count[c];
            }
            for (std::size_t i = 0; i < W; ++i) {
                std::size_t c = i % p;
                if (!rep.period[i] && constant[c] && count[c] >= 2) {
                    rep.period[i] = p;
                    ++verified;
                }
            }
        }
        rep.density.emplace_back(Integer(static_cast<unsigned long>(verified)), Integer(static_cast<unsigned long>(W)));
        rep.density.back().canonicalize();
    }
    const unsigned long long half = (static_cast<unsigned long long>(b - a) + 1) / 2;
    for (std::size_t k = 0; k < rep.moduli.size(); ++k)
        if (rep.moduli[k] <= half) rep.shadow_level = k + 1;
    auto d = discontinuities(inst);
    for (std::size_t i = 0; i < W; ++i) {
        if (rep.period[i]) continue;
        long long j = a + static_cast<long long>(i);
        rep.unverified.push_back(j);
        auto w = std::get<OdometerPoint>(act(inst.sys, GroupElement(static_cast<long>(j)), inst.sys.theta0()));
        if (!in_prefix_shadow(d, w, rep.shadow_level)) ++rep.unverified_outside_shadow;
    }
    return rep;
}

}  // namespace semico
