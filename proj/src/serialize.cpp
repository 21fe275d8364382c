#include "semico/serialize.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "semico/errors.hpp"

namespace semico {

namespace {

[[noreturn]] void bad(const std::string& at, const std::string& what)
{
    throw ConfigError(fmt::format("{}: {}", at.empty() ? "/" : at, what));
}

std::string sub(const std::string& at, const std::string& key) { return at + "/" + key; }
std::string sub(const std::string& at, std::size_t i) { return at + "/" + std::to_string(i); }

void need_object(const json& j, const std::string& at)
{
    if (!j.is_object()) bad(at, "expected an object");
}

void need_array(const json& j, const std::string& at)
{
    if (!j.is_array()) bad(at, "expected an array");
}

const json& need(const json& j, const char* key, const std::string& at)
{
    need_object(j, at);
    auto it = j.find(key);
    if (it == j.end()) bad(at, fmt::format("missing field '{}'", key));
    return *it;
}

const json* maybe(const json& j, const char* key)
{
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& at)
{
    need_object(j, at);
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) bad(sub(at, it.key()), "unknown field");
}

std::size_t size_from(const json& j, const std::string& at)
{
    Integer z = integer_from(j, at);
    if (sgn(z) < 0 || !z.fits_ulong_p()) bad(at, "expected a non-negative integer");
    return z.get_ui();
}

long long ll_from(const json& j, const std::string& at)
{
    Integer z = integer_from(j, at);
    if (!z.fits_slong_p()) bad(at, "integer out of range");
    return z.get_si();
}

std::string string_from(const json& j, const std::string& at)
{
    if (!j.is_string()) bad(at, "expected a string");
    return j.get<std::string>();
}

bool bool_from(const json& j, const std::string& at)
{
    if (!j.is_boolean()) bad(at, "expected true or false");
    return j.get<bool>();
}

// Module errors raised while interpreting otherwise well-formed input are config errors.
template <class F>
auto guarded(const std::string& at, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        bad(at, e.what());
    }
}

const char* tail_name(Tail t)
{
    switch (t) {
    case Tail::zero: return "zero";
    case Tail::max: return "max";
    default: return "opaque";
    }
}

}  // namespace

json to_json(const Integer& z)
{
    if (z.fits_slong_p()) return json(static_cast<std::int64_t>(z.get_si()));
    return json(z.get_str());
}

Integer integer_from(const json& j, const std::string& at)
{
    if (j.is_number_integer()) {
        if (j.is_number_unsigned()) return Integer(std::to_string(j.get<std::uint64_t>()));
        return Integer(std::to_string(j.get<std::int64_t>()));
    }
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        std::size_t k = !s.empty() && s[0] == '-' ? 1 : 0;
        if (k == s.size() || s.find_first_not_of("0123456789", k) != std::string::npos)
            bad(at, fmt::format("'{}' is not a decimal integer", s));
        return Integer(s);
    }
    bad(at, "expected an integer");
}

json to_json(const Rational& r) { return json{{"p", to_json(r.get_num())}, {"q", to_json(r.get_den())}}; }

Rational rational_from(const json& j, const std::string& at)
{
    if (j.is_number_integer() || j.is_string()) return Rational(integer_from(j, at));
    Integer p = integer_from(need(j, "p", at), sub(at, "p"));
    Integer q = integer_from(need(j, "q", at), sub(at, "q"));
    if (sgn(q) <= 0) bad(sub(at, "q"), "denominator must be positive");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

json to_json(const ExactScalar& x)
{
    json j = to_json(x.rational_part());
    if (!x.is_rational()) {
        j["sp"] = to_json(x.surd_part().get_num());
        j["sq"] = to_json(x.surd_part().get_den());
        j["d"] = x.discriminant();
    }
    return j;
}

ExactScalar scalar_from(const json& j, const std::string& at)
{
    Rational a = rational_from(j, at);
    if (!j.is_object() || !maybe(j, "sp")) return ExactScalar(a);
    Integer sp = integer_from(need(j, "sp", at), sub(at, "sp"));
    Integer sq = j.contains("sq") ? integer_from(j["sq"], sub(at, "sq")) : Integer(1);
    if (sgn(sq) <= 0) bad(sub(at, "sq"), "denominator must be positive");
    long d = static_cast<long>(ll_from(need(j, "d", at), sub(at, "d")));
    Rational b(sp, sq);
    b.canonicalize();
    return guarded(at, [&] { return ExactScalar(a, b, d); });
}

json to_json(const BaseSystem& sys)
{
    if (sys.is_rotation())
        return json{{"kind", "rotation"},
                    {"alpha", to_json(sys.alpha())},
                    {"theta", to_json(std::get<CirclePoint>(sys.theta()).value())},
                    {"theta0", to_json(std::get<CirclePoint>(sys.theta0()).value())}};
    json scale = json::array();
    for (const auto& n : sys.scale().moduli(sys.scale().ratios().size() + 2))
        scale.push_back(to_json(n));
    return json{{"kind", "odometer"},
                {"scale", scale},
                {"depth", sys.depth()},
                {"theta0_pattern", sys.theta0_pattern()}};
}

BaseSystem system_from(const json& j, const std::string& at)
{
    std::string kind = string_from(need(j, "kind", at), sub(at, "kind"));
    if (kind == "rotation") {
        only_keys(j, {"kind", "alpha", "theta", "theta0"}, at);
        ExactScalar alpha = scalar_from(need(j, "alpha", at), sub(at, "alpha"));
        BaseSystem s = guarded(sub(at, "alpha"), [&] { return BaseSystem::rotation(alpha); });
        if (auto t = maybe(j, "theta")) s.set_theta(CirclePoint(scalar_from(*t, sub(at, "theta"))));
        if (auto t = maybe(j, "theta0")) s.set_theta0(CirclePoint(scalar_from(*t, sub(at, "theta0"))));
        return s;
    }
    if (kind == "odometer") {
        only_keys(j, {"kind", "scale", "depth", "theta0_pattern"}, at);
        OdometerScale scale;
        if (auto s = maybe(j, "scale")) {
            need_array(*s, sub(at, "scale"));
            std::vector<Integer> moduli;
            for (std::size_t i = 0; i < s->size(); ++i)
                moduli.push_back(integer_from((*s)[i], sub(sub(at, "scale"), i)));
            scale = guarded(sub(at, "scale"), [&] { return OdometerScale::from_moduli(moduli); });
        }
        std::size_t depth = 64;
        if (auto d = maybe(j, "depth")) depth = size_from(*d, sub(at, "depth"));
        std::vector<std::uint32_t> pattern{1, 0};
        if (auto p = maybe(j, "theta0_pattern")) {
            need_array(*p, sub(at, "theta0_pattern"));
            pattern.clear();
            for (std::size_t i = 0; i < p->size(); ++i)
                pattern.push_back(static_cast<std::uint32_t>(size_from((*p)[i], sub(sub(at, "theta0_pattern"), i))));
        }
        return guarded(at, [&] { return BaseSystem::odometer(scale, depth, pattern); });
    }
    bad(sub(at, "kind"), fmt::format("unknown system kind '{}' (rotation or odometer)", kind));
}

json point_to_json(const BaseSystem& sys, const Point& p)
{
    if (sys.is_rotation()) return to_json(std::get<CirclePoint>(p).value());
    const auto& op = std::get<OdometerPoint>(p);
    if (auto v = odometer_value(sys, op); v && op.digits.size() == sys.depth()) return json{{"integer", to_json(*v)}};
    return json{{"digits", op.digits}, {"tail", tail_name(op.tail)}};
}

Point point_from(const BaseSystem& sys, const json& j, const std::string& at)
{
    if (sys.is_rotation()) return CirclePoint(scalar_from(j, at));
    if (auto v = maybe(j, "integer")) {
        Integer g = integer_from(*v, sub(at, "integer"));
        return sys.odometer_integer(g);
    }
    OdometerPoint p;
    const json& d = need(j, "digits", at);
    need_array(d, sub(at, "digits"));
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::size_t x = size_from(d[i], sub(sub(at, "digits"), i));
        if (x >= sys.scale().ratio(i + 1)) bad(sub(sub(at, "digits"), i), "digit exceeds its modulus");
        p.digits.push_back(static_cast<std::uint32_t>(x));
    }
    std::string t = string_from(need(j, "tail", at), sub(at, "tail"));
    if (t == "zero")
        p.tail = Tail::zero;
    else if (t == "max")
        p.tail = Tail::max;
    else if (t == "opaque")
        p.tail = Tail::opaque;
    else
        bad(sub(at, "tail"), "expected zero, max or opaque");
    return p;
}

json to_json(const RadiiLadder& L)
{
    json levels = json::array();
    for (const auto& lev : L.levels) {
        json a = json::array();
        for (const auto& r : lev)
            a.push_back(to_json(r));
        levels.push_back(std::move(a));
    }
    return json{{"base_kind", to_string(L.base_kind)},
                {"tail_ratio", to_json(L.tail_ratio)},
                {"levels", std::move(levels)},
                {"links", L.links}};
}

RadiiLadder ladder_from(const json& j, const std::string& at)
{
    only_keys(j, {"base_kind", "tail_ratio", "levels", "links"}, at);
    RadiiLadder L;
    L.base_kind = guarded(sub(at, "base_kind"),
                          [&] { return base_kind_from_string(string_from(need(j, "base_kind", at), sub(at, "base_kind"))); });
    if (auto t = maybe(j, "tail_ratio")) L.tail_ratio = rational_from(*t, sub(at, "tail_ratio"));
    const json& levels = need(j, "levels", at);
    need_array(levels, sub(at, "levels"));
    for (std::size_t n = 0; n < levels.size(); ++n) {
        std::string an = sub(sub(at, "levels"), n);
        need_array(levels[n], an);
        std::vector<Rational> lev;
        lev.reserve(levels[n].size());
        for (std::size_t i = 0; i < levels[n].size(); ++i)
            lev.push_back(rational_from(levels[n][i], sub(an, i)));
        L.levels.push_back(std::move(lev));
    }
    const json& links = need(j, "links", at);
    need_array(links, sub(at, "links"));
    for (std::size_t i = 0; i < links.size(); ++i)
        L.links.push_back(size_from(links[i], sub(sub(at, "links"), i)));
    if (L.levels.empty()) bad(sub(at, "levels"), "a ladder needs at least one level");
    if (L.links.size() + 1 != L.levels.size())
        bad(sub(at, "links"), fmt::format("expected {} links for {} levels", L.levels.size() - 1, L.levels.size()));
    return L;
}

LadderParams ladder_params_from(const json& j, BaseKind kind, const std::string& at)
{
    only_keys(j,
              {"depth", "level_length", "m_schedule", "geometric", "max_level_length", "tail_ratio", "level_one",
               "split_low", "split_high", "spacing", "min_spacing"},
              at);
    LadderParams p;
    p.base_kind = kind;
    if (auto v = maybe(j, "depth")) p.depth = size_from(*v, sub(at, "depth"));
    if (auto v = maybe(j, "level_length")) p.level_length = size_from(*v, sub(at, "level_length"));
    if (auto v = maybe(j, "m_schedule")) {
        need_array(*v, sub(at, "m_schedule"));
        for (std::size_t i = 0; i < v->size(); ++i)
            p.m_schedule.push_back(size_from((*v)[i], sub(sub(at, "m_schedule"), i)));
    }
    if (auto v = maybe(j, "geometric")) p.geometric = bool_from(*v, sub(at, "geometric"));
    if (auto v = maybe(j, "max_level_length")) p.max_level_length = size_from(*v, sub(at, "max_level_length"));
    if (auto v = maybe(j, "tail_ratio")) p.tail_ratio = rational_from(*v, sub(at, "tail_ratio"));
    if (auto v = maybe(j, "level_one")) {
        need_array(*v, sub(at, "level_one"));
        for (std::size_t i = 0; i < v->size(); ++i)
            p.level_one.push_back(rational_from((*v)[i], sub(sub(at, "level_one"), i)));
    }
    if (auto v = maybe(j, "split_low")) p.split_low = rational_from(*v, sub(at, "split_low"));
    if (auto v = maybe(j, "split_high")) p.split_high = rational_from(*v, sub(at, "split_high"));
    if (auto v = maybe(j, "spacing")) p.spacing = ll_from(*v, sub(at, "spacing"));
    if (auto v = maybe(j, "min_spacing")) p.min_spacing = ll_from(*v, sub(at, "min_spacing"));
    if (p.depth < 1) bad(sub(at, "depth"), "depth must be at least 1");
    if (!(sgn(p.split_low) > 0 && p.split_low < p.split_high && p.split_high < 1))
        bad(sub(at, "split_low"), "need 0 < split_low < split_high < 1");
    if (!(sgn(p.tail_ratio) > 0 && p.tail_ratio < 1)) bad(sub(at, "tail_ratio"), "need 0 < tail_ratio < 1");
    return p;
}

json to_json(const SemicocycleInstance& inst)
{
    json anchors{{"theta", point_to_json(inst.sys, inst.anchors.theta)}};
    if (inst.anchors.theta_prime) anchors["theta_prime"] = point_to_json(inst.sys, *inst.anchors.theta_prime);
    json g = json::array();
    for (const auto& x : inst.anchors.g)
        g.push_back(to_json(x));
    anchors["g"] = std::move(g);
    if (inst.anchors.r) anchors["r"] = to_json(*inst.anchors.r);
    json blocks = json::array();
    for (const auto& b : inst.blocks)
        blocks.push_back(json{{"s", b.s}, {"alpha", b.alpha}, {"level", b.level}, {"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}});
    return json{{"construction", to_string(inst.construction)},
                {"variant", to_string(inst.variant)},
                {"system", to_json(inst.sys)},
                {"ladder", to_json(inst.ladder)},
                {"anchors", std::move(anchors)},
                {"s_max", inst.s_max},
                {"blocks", std::move(blocks)}};
}

SemicocycleInstance instance_from(const json& j, const std::string& at)
{
    only_keys(j, {"construction", "variant", "system", "ladder", "anchors", "s_max", "blocks"}, at);
    SemicocycleInstance inst;
    inst.construction = guarded(sub(at, "construction"), [&] {
        return construction_from_string(string_from(need(j, "construction", at), sub(at, "construction")));
    });
    inst.variant = guarded(sub(at, "variant"), [&] {
        return variant_from_string(string_from(need(j, "variant", at), sub(at, "variant")));
    });
    inst.sys = system_from(need(j, "system", at), sub(at, "system"));
    inst.ladder = ladder_from(need(j, "ladder", at), sub(at, "ladder"));

    const std::string aa = sub(at, "anchors");
    const json& a = need(j, "anchors", at);
    only_keys(a, {"theta", "theta_prime", "g", "r"}, aa);
    inst.anchors.theta = point_from(inst.sys, need(a, "theta", aa), sub(aa, "theta"));
    if (auto t = maybe(a, "theta_prime")) inst.anchors.theta_prime = point_from(inst.sys, *t, sub(aa, "theta_prime"));
    const json& g = need(a, "g", aa);
    need_array(g, sub(aa, "g"));
    for (std::size_t i = 0; i < g.size(); ++i)
        inst.anchors.g.push_back(integer_from(g[i], sub(sub(aa, "g"), i)));
    if (auto r = maybe(a, "r")) inst.anchors.r = scalar_from(*r, sub(aa, "r"));

    if (auto s = maybe(j, "s_max")) inst.s_max = size_from(*s, sub(at, "s_max"));
    if (auto b = maybe(j, "blocks")) {
        need_array(*b, sub(at, "blocks"));
        for (std::size_t k = 0; k < b->size(); ++k) {
            const std::string ab = sub(sub(at, "blocks"), k);
            const json& e = (*b)[k];
            only_keys(e, {"s", "alpha", "level", "lo", "hi"}, ab);
            std::size_t s = size_from(need(e, "s", ab), sub(ab, "s"));
            if (s != k + 1) bad(sub(ab, "s"), fmt::format("expected block {}", k + 1));
            BlockLayout bl = guarded(ab, [&] { return block_layout(inst.ladder, inst.variant, s); });
            if (size_from(need(e, "alpha", ab), sub(ab, "alpha")) != bl.alpha ||
                size_from(need(e, "level", ab), sub(ab, "level")) != bl.level ||
                rational_from(need(e, "lo", ab), sub(ab, "lo")) != bl.lo ||
                rational_from(need(e, "hi", ab), sub(ab, "hi")) != bl.hi)
                bad(ab, "stored block layout does not match the ladder");
            inst.blocks.push_back(std::move(bl));
        }
    }
    if (inst.construction == Construction::tame_nonnull && inst.blocks.size() != inst.s_max)
        bad(sub(at, "blocks"), fmt::format("expected {} blocks for s_max", inst.s_max));
    guarded(sub(at, "anchors"), [&] {
        prepare(inst);
        return 0;
    });
    return inst;
}

json to_json(const IndependenceCertificate& c)
{
    json pos = json::array();
    for (const auto& g : c.query.positions)
        pos.push_back(to_json(g));
    json w = json::object();
    for (const auto& [k, h] : c.witnesses)
        w[k] = to_json(h);
    auto vs = [](const ValueSet& v) { return json{{"lo", to_json(v.lo)}, {"hi", to_json(v.hi)}}; };
    return json{{"positions", std::move(pos)},
                {"targets", json{{"V0", vs(c.query.v0)}, {"V1", vs(c.query.v1)}}},
                {"witnesses", std::move(w)}};
}

IndependenceCertificate certificate_from(const json& j, const std::string& at)
{
    only_keys(j, {"positions", "targets", "witnesses"}, at);
    IndependenceCertificate c;
    const json& pos = need(j, "positions", at);
    need_array(pos, sub(at, "positions"));
    for (std::size_t i = 0; i < pos.size(); ++i)
        c.query.positions.push_back(integer_from(pos[i], sub(sub(at, "positions"), i)));
    const std::string at_t = sub(at, "targets");
    const json& t = need(j, "targets", at);
    only_keys(t, {"V0", "V1"}, at_t);
    auto vs = [&](const char* key) {
        const std::string av = sub(at_t, key);
        const json& v = need(t, key, at_t);
        only_keys(v, {"lo", "hi"}, av);
        return ValueSet{rational_from(need(v, "lo", av), sub(av, "lo")), rational_from(need(v, "hi", av), sub(av, "hi"))};
    };
    c.query.v0 = vs("V0");
    c.query.v1 = vs("V1");
    const json& w = need(j, "witnesses", at);
    need_object(w, sub(at, "witnesses"));
    for (auto it = w.begin(); it != w.end(); ++it)
        c.witnesses[it.key()] = integer_from(it.value(), sub(sub(at, "witnesses"), it.key()));
    return c;
}

json to_json(const std::vector<Violation>& v)
{
    json a = json::array();
    for (const auto& x : v)
        a.push_back(json{{"rule", x.rule}, {"level", x.level}, {"index", x.index}, {"detail", x.detail}});
    return a;
}

json to_json(const VerificationReport& r)
{
    json f = json::array();
    for (const auto& x : r.failures)
        f.push_back(json{{"pattern", x.pattern}, {"position", x.position}, {"detail", x.detail}});
    return json{{"valid", r.empty()}, {"problems", r.problems}, {"failures", std::move(f)}};
}

json to_json(const TamenessReport& r)
{
    auto hits = [](const std::vector<OrbitHit>& v) {
        json a = json::array();
        for (const auto& h : v) {
            json e{{"h", to_json(h.h)}};
            if (h.anchor == DiscontinuityDescriptor::npos)
                e["anchor"] = "theta_prime";
            else
                e["anchor"] = h.anchor;
            if (h.sphere) {
                e["sphere"] = *h.sphere;
                e["sign"] = h.sign;
            }
            a.push_back(std::move(e));
        }
        return a;
    };
    json j{{"note", "precondition report only; it does not prove tameness"},
           {"discontinuities",
            json{{"class", r.df_finite ? "finite" : "countable"},
                 {"points", r.df_points},
                 {"sphere_families", r.sphere_families}}},
           {"scan", json{{"start", to_json(r.scan_start)}, {"count", to_json(r.scan_count)}}},
           {"orbit_hits",
            json{{"theta0", hits(r.hits.theta0)}, {"theta", hits(r.hits.theta)}, {"theta_prime", hits(r.hits.theta_prime)}}},
           {"families_hit", r.families_hit},
           {"max_hits_per_family", r.max_hits_per_family},
           {"family_solution_bound", r.family_solution_bound},
           {"free_action", r.free_action},
           {"freeness", r.freeness}};
    if (r.residues_disjoint) {
        j["residues_disjoint"] = *r.residues_disjoint;
        j["distinct_radii"] = r.distinct_radii;
    }
    return j;
}

std::string word_csv(const Word& w)
{
    std::string out = "g,value\n";
    for (const auto& [g, v] : w)
        out += fmt::format("{},{}\n", g.get_str(), v.to_string());
    return out;
}

std::string toeplitz_csv(const ToeplitzReport& r)
{
    std::string out = "position,period\n";
    for (std::size_t i = 0; i < r.period.size(); ++i) {
        long long j = r.a + static_cast<long long>(i);
        if (r.period[i])
            out += fmt::format("{},{}\n", j, r.period[i]);
        else
            out += fmt::format("{},unverified\n", j);
    }
    return out;
}

std::string toeplitz_density_csv(const ToeplitzReport& r)
{
    std::string out = "modulus,density\n";
    for (std::size_t k = 0; k < r.moduli.size(); ++k)
        out += fmt::format("{},{}\n", r.moduli[k], to_string(r.density[k]));
    return out;
}

json parse_json_text(const std::string& text, const std::string& name)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(fmt::format("{}:{}:{}: malformed JSON: {}", name, line, col, e.what()));
    }
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("{}: cannot open file", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

std::string dump_json(const json& j, bool pretty) { return (pretty ? j.dump(2) : j.dump()) + "\n"; }

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("{}: cannot write file", path));
    out << text;
    if (!out) throw std::runtime_error(fmt::format("{}: write failed", path));
}

}  // namespace semico
