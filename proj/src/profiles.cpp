#include "semico/profiles.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include <fmt/format.h>

#include "semico/errors.hpp"

namespace semico {

std::string to_string(ProfileVariant v) { return v == ProfileVariant::continuous ? "continuous" : "binary"; }

ProfileVariant variant_from_string(const std::string& s)
{
    if (s == "continuous") return ProfileVariant::continuous;
    if (s == "binary") return ProfileVariant::binary;
    throw ConfigError(fmt::format("unknown profile variant '{}'", s));
}

CellRef cell(const RadiiLadder& L, std::size_t n, std::size_t j)
{
    if (n < 1 || n > L.depth() || j < 1 || j + 1 > L.length(n))
        throw PreconditionError(fmt::format("no cell {} at level {}", j, n));
    return CellRef{n, j, L.r(n, j + 1), L.r(n, j)};
}

int plateau_value(std::size_t j)
{
    if (j % 4 == 2) return 1;
    if (j % 4 == 0) return 0;
    return -1;
}

int node_value(std::size_t i)
{
    if (i <= 1) return 0;
    return i % 2 == 0 ? plateau_value(i) : plateau_value(i - 1);
}

namespace {

// 1-based cell j with r_{j+1} <= x < r_j, assuming r_L <= x < r_1
std::size_t locate(const std::vector<Rational>& R, const ExactScalar& x)
{
    auto it = std::partition_point(R.begin(), R.end(), [&](const Rational& r) { return x < r; });
    return static_cast<std::size_t>(it - R.begin());
}

// f'_n at a point p known to lie in the closed cell c
int binary_at(const std::vector<Rational>& R, std::size_t c, const Rational& p)
{
    if (c % 4 == 2) return 1;
    if (c >= 2 && (c - 1) % 4 == 2 && p == R[c - 1]) return 1;
    if ((c + 1) % 4 == 2 && c + 1 <= R.size() - 1 && p == R[c]) return 1;
    return 0;
}

}  // namespace

ExactScalar eval_profile(const RadiiLadder& L, ProfileVariant v, std::size_t n, const ExactScalar& x)
{
    if (x.sign() <= 0) throw PreconditionError("profiles are evaluated at x > 0 only");
    if (n < 1 || n > L.depth()) throw PreconditionError(fmt::format("profile level {} outside ladder depth", n));
    const auto& R = L.level(n);
    if (x >= R.front()) return ExactScalar(0);
    const std::size_t Ln = R.size();
    if (x < R.back()) {
        if (v == ProfileVariant::binary)
            throw ResolutionError(fmt::format("resolution exceeded: x below r_{}^{}", Ln, n));
        return ExactScalar(Rational(node_value(Ln))) * x / ExactScalar(R.back());
    }
    std::size_t j = locate(R, x);
    if (v == ProfileVariant::binary) {
        if (j % 4 == 2) return ExactScalar(1);
        if ((j + 1) % 4 == 2 && j + 1 <= Ln - 1 && x == R[j]) return ExactScalar(1);
        return ExactScalar(0);
    }
    int p = plateau_value(j);
    if (p >= 0) return ExactScalar(p);
    const Rational& hi = R[j - 1];
    const Rational& lo = R[j];
    int vt = node_value(j), vb = node_value(j + 1);
    ExactScalar t = (x - ExactScalar(lo)) / ExactScalar(Rational(hi - lo));
    return ExactScalar(vb) + ExactScalar(vt - vb) * t;
}

std::string Pattern::key() const
{
    std::string s;
    for (std::size_t k = 0; k < length; ++k)
        s.push_back((*this)[k] ? '1' : '0');
    return s;
}

Pattern Pattern::from_key(const std::string& key)
{
    if (key.size() > 32) throw PreconditionError("patterns longer than 32 bits are not supported");
    Pattern p;
    p.length = key.size();
    for (std::size_t k = 0; k < key.size(); ++k) {
        if (key[k] == '1')
            p.bits |= 1u << k;
        else if (key[k] != '0')
            throw PreconditionError(fmt::format("pattern key '{}' is not a 0/1 string", key));
    }
    return p;
}

std::vector<CellPattern> classify_cells(const RadiiLadder& L, ProfileVariant v, std::size_t alpha, std::size_t s)
{
    const std::size_t N = alpha + s;
    if (s < 1 || s > 32) throw PreconditionError("pattern length must be in 1..32");
    if (N > L.depth())
        throw DepthError(fmt::format("depth insufficient: alpha + s = {} exceeds ladder depth {}", N, L.depth()));
    const auto& top = L.level(N);
    std::vector<std::size_t> c(s, 1);
    std::vector<CellPattern> out;
    for (std::size_t j = 1; j + 1 <= top.size(); ++j) {
        const Rational& hi = top[j - 1];
        const Rational& lo = top[j];
        std::uint32_t bits = 0;
        bool constant = true;
        for (std::size_t k = 0; k < s; ++k) {
            const auto& R = L.level(alpha + 1 + k);
            while (R[c[k]] > lo)
                ++c[k];
            std::size_t ck = c[k];
            int bit;
            if (v == ProfileVariant::continuous) {
                bit = plateau_value(ck);
                if (bit < 0) constant = false;
            } else {
                bit = ck % 4 == 2 ? 1 : 0;
                if (binary_at(R, ck, lo) != bit || binary_at(R, ck, hi) != bit) constant = false;
            }
            if (!constant) break;
            if (bit) bits |= 1u << k;
        }
        if (constant) out.push_back({j, bits});
    }
    return out;
}

namespace {

CellRef checked_cell(const RadiiLadder& L, ProfileVariant v, std::size_t alpha, const Pattern& a, std::size_t index)
{
    CellRef ref = cell(L, alpha + a.length, index);
    Rational mid = (ref.lo + ref.hi) / 2;
    for (std::size_t k = 0; k < a.length; ++k)
        for (const Rational* x : {&ref.lo, &mid, &ref.hi})
            if (eval_profile(L, v, alpha + 1 + k, ExactScalar(*x)) != ExactScalar(a[k]))
                throw std::logic_error("cell classification disagrees with direct evaluation");
    return ref;
}

}  // namespace

CellRef free_interval(const RadiiLadder& L, ProfileVariant v, std::size_t alpha, const Pattern& a)
{
    for (const auto& cp : classify_cells(L, v, alpha, a.length))
        if (cp.bits == a.bits) return checked_cell(L, v, alpha, a, cp.index);
    throw DepthError(fmt::format("depth/length insufficient: no level-{} cell realizes pattern {}", alpha + a.length,
                                 a.key()));
}

std::vector<CellRef> free_intervals(const RadiiLadder& L, ProfileVariant v, std::size_t alpha, std::size_t s)
{
    if (s > 24) throw PreconditionError("pattern length must be at most 24 for a full table");
    const std::size_t count = std::size_t(1) << s;
    std::vector<std::size_t> first(count, 0);
    for (const auto& cp : classify_cells(L, v, alpha, s))
        if (!first[cp.bits]) first[cp.bits] = cp.index;
    std::vector<CellRef> out;
    out.reserve(count);
    for (std::uint32_t a = 0; a < count; ++a) {
        Pattern p{a, s};
        if (!first[a])
            throw DepthError(fmt::format("depth/length insufficient: no level-{} cell realizes pattern {}", alpha + s,
                                         p.key()));
        out.push_back(checked_cell(L, v, alpha, p, first[a]));
    }
    return out;
}

BlockLayout block_layout(const RadiiLadder& L, ProfileVariant v, std::size_t s)
{
    BlockLayout b;
    b.s = s;
    b.alpha = block_alpha(s);
    b.level = b.alpha + s;
    if (b.level > L.depth())
        throw DepthError(fmt::format("depth insufficient: block {} needs ladder depth {}", s, b.level));
    // J_s is the hull of every realizing cell, so witnesses may aim at any of them
    auto all_cells = classify_cells(L, v, b.alpha, s);
    const std::size_t count = std::size_t(1) << s;
    std::vector<bool> seen(count, false);
    std::size_t top_cell = SIZE_MAX, bottom_cell = 0;
    for (const auto& c : all_cells) {
        seen[c.bits] = true;
        top_cell = std::min(top_cell, c.index);
        bottom_cell = std::max(bottom_cell, c.index);
    }
    for (std::uint32_t a = 0; a < count; ++a)
        if (!seen[a])
            throw DepthError(fmt::format("depth insufficient: pattern {} has no cell at level {}",
                                         Pattern{a, s}.key(), b.level));
    const auto& R = L.level(b.level);
    const Rational& top = R[top_cell - 1];
    const Rational& bottom = R[bottom_cell];
    std::vector<Rational> cand;
    for (std::size_t n = b.alpha + 1; n <= b.level; ++n)
        for (const auto& r : L.level(n))
            if (r >= top || r <= bottom) cand.push_back(r);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    auto all_zero = [&](const Rational& p) {
        for (std::size_t n = b.alpha + 1; n <= b.level; ++n)
            if (eval_profile(L, v, n, ExactScalar(p)).sign() != 0) return false;
        return true;
    };
    auto up = std::lower_bound(cand.begin(), cand.end(), top);
    while (up != cand.end() && !all_zero(*up))
        ++up;
    auto down = std::upper_bound(cand.begin(), cand.end(), bottom);
    while (down != cand.begin() && !all_zero(*(down - 1)))
        --down;
    if (up == cand.end() || down == cand.begin())
        throw DepthError(fmt::format("depth insufficient: no zero endpoint for J_{} within level {}", s, b.level));
    b.hi = *up;
    b.lo = *(down - 1);
    for (const auto& c : all_cells)
        if (R[c.index] >= b.lo && R[c.index - 1] <= b.hi) b.cells.push_back(c);
    return b;
}

ExactScalar eval_bar(const RadiiLadder& L, ProfileVariant v, const BlockLayout& block, std::size_t n,
                     const ExactScalar& x)
{
    if (n <= block.alpha || n > block.level)
        throw PreconditionError(fmt::format("level {} is not in block {}", n, block.s));
    if (!block.contains(x)) return ExactScalar(0);
    return eval_profile(L, v, n, x);
}

std::string plot_csv(const RadiiLadder& L, ProfileVariant v, const std::vector<std::size_t>& levels)
{
    std::string out = "level,x,value\n";
    for (std::size_t n : levels) {
        const auto& R = L.level(n);
        for (std::size_t i = R.size(); i >= 1; --i) {
            const Rational& r = R[i - 1];
            out += fmt::format("{},{},{}\n", n, to_string(r), eval_profile(L, v, n, ExactScalar(r)).to_string());
            if (i > 1) {
                Rational mid = (r + R[i - 2]) / 2;
                out += fmt::format("{},{},{}\n", n, to_string(mid),
                                   eval_profile(L, v, n, ExactScalar(mid)).to_string());
            }
        }
    }
    return out;
}

std::string plot_svg(const RadiiLadder& L, ProfileVariant v, const std::vector<std::size_t>& levels)
{
    static const char* colours[] = {"blue", "red", "green", "orange", "purple"};
    const double W = 800, H = 300, pad = 30;
    if (levels.empty()) throw PreconditionError("nothing to plot");
    double xmax = 0;
    for (std::size_t n : levels)
        xmax = std::max(xmax, L.r(n, 1).get_d());
    xmax *= 1.1;
    auto X = [&](double x) { return pad + (W - 2 * pad) * x / xmax; };
    auto Y = [&](double y) { return H - pad - (H - 2 * pad) * y; };
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\">\n"
        "<!-- lossy rendering: coordinates are floating-point approximations -->\n"
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n"
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n",
        W, H, X(0), Y(0), X(xmax), Y(0), X(0), Y(0), X(0), Y(1));
    for (std::size_t idx = 0; idx < levels.size(); ++idx) {
        std::size_t n = levels[idx];
        const auto& R = L.level(n);
        std::vector<std::pair<double, double>> pts;
        pts.emplace_back(0.0, 0.0);
        if (v == ProfileVariant::continuous) pts.emplace_back(R.back().get_d(), node_value(R.size()));
        for (std::size_t j = R.size() - 1; j >= 1; --j) {
            const Rational& lo = R[j];
            const Rational& hi = R[j - 1];
            if (v == ProfileVariant::continuous) {
                pts.emplace_back(lo.get_d(), node_value(j + 1));
                pts.emplace_back(hi.get_d(), node_value(j));
            } else {
                double y = j % 4 == 2 ? 1.0 : 0.0;
                pts.emplace_back(lo.get_d(), y);
                pts.emplace_back(hi.get_d(), y);
            }
        }
        pts.emplace_back(R.front().get_d(), 0.0);
        pts.emplace_back(xmax, 0.0);
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"",
                           colours[idx % 5]);
        for (std::size_t i = 0; i < pts.size(); ++i)
            out += fmt::format("{}{:.3f},{:.3f}", i ? " " : "", X(pts[i].first), Y(pts[i].second));
        out += fmt::format("\"/>\n<text x=\"{:.0f}\" y=\"{:.0f}\" fill=\"{}\">f_{}</text>\n", W - 80,
                           pad + 15.0 * idx, colours[idx % 5], n);
    }
    out += "</svg>\n";
    return out;
}

}  // namespace semico
