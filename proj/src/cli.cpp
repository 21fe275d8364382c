#include "semico/cli.hpp"

#include <filesystem>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "semico/errors.hpp"
#include "semico/profiles.hpp"

namespace semico {

namespace {

[[noreturn]] void bad(const std::string& at, const std::string& what) { throw ConfigError(fmt::format("{}: {}", at, what)); }

long long ll_at(const json& j, const std::string& at)
{
    Integer z = integer_from(j, at);
    if (!z.fits_slong_p()) bad(at, "integer out of range");
    return z.get_si();
}

std::size_t size_at(const json& j, const std::string& at)
{
    long long v = ll_at(j, at);
    if (v < 0) bad(at, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::pair<long long, long long> parse_window(const std::string& s, const std::string& at)
{
    auto colon = s.find(':', 1);
    if (colon == std::string::npos) bad(at, fmt::format("window '{}' is not of the form a:b", s));
    try {
        std::size_t k1 = 0, k2 = 0;
        long long a = std::stoll(s.substr(0, colon), &k1);
        long long b = std::stoll(s.substr(colon + 1), &k2);
        if (k1 != colon || k2 != s.size() - colon - 1) throw std::invalid_argument("trailing");
        if (a > b) bad(at, fmt::format("window '{}' is empty", s));
        return {a, b};
    } catch (const std::logic_error&) {
        bad(at, fmt::format("window '{}' is not of the form a:b", s));
    }
}

std::string describe_size(const Integer& z)
{
    std::string s = z.get_str();
    if (s.size() <= 24) return s;
    return fmt::format("a {}-digit integer", s.size());
}

}  // namespace

RunConfig run_config_from(const json& j, const std::string& at)
{
    auto sub = [&](const char* k) { return at + "/" + k; };
    if (!j.is_object()) bad(at, "expected an object");
    static const std::set<std::string> known{"system",     "ladder",  "construction", "variant",      "s_max",
                                             "s",          "ell",     "anchor_search", "search_bound", "delta",
                                             "scan",       "window",  "shift",        "period_bound", "census",
                                             "probes",     "seed",    "plot_levels"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) bad(at + "/" + it.key(), "unknown field");
    RunConfig c;
    if (j.contains("system")) c.system = system_from(j["system"], sub("system"));
    BaseKind kind = c.system.is_odometer() ? BaseKind::odometer_dyadic : BaseKind::rotation_rationals;
    c.ladder = ladder_params_from(j.value("ladder", json::object()), kind, sub("ladder"));
    if (j.contains("construction")) {
        if (!j["construction"].is_string()) bad(sub("construction"), "expected a string");
        try {
            c.construction = construction_from_string(j["construction"].get<std::string>());
        } catch (const std::exception& e) {
            bad(sub("construction"), e.what());
        }
    }
    if (j.contains("variant")) {
        if (!j["variant"].is_string()) bad(sub("variant"), "expected a string");
        try {
            c.variant = variant_from_string(j["variant"].get<std::string>());
        } catch (const std::exception& e) {
            bad(sub("variant"), e.what());
        }
    }
    if (j.contains("s_max")) c.s_max = size_at(j["s_max"], sub("s_max"));
    if (j.contains("s")) c.s = size_at(j["s"], sub("s"));
    if (j.contains("ell")) c.ell = size_at(j["ell"], sub("ell"));
    if (j.contains("anchor_search")) {
        const json& a = j["anchor_search"];
        const std::string aa = sub("anchor_search");
        if (!a.is_object()) bad(aa, "expected an object");
        for (auto it = a.begin(); it != a.end(); ++it)
            if (it.key() != "candidate_bound" && it.key() != "digit_margin") bad(aa + "/" + it.key(), "unknown field");
        if (a.contains("candidate_bound"))
            c.anchor_search.candidate_bound = static_cast<long>(ll_at(a["candidate_bound"], aa + "/candidate_bound"));
        if (a.contains("digit_margin")) c.anchor_search.digit_margin = size_at(a["digit_margin"], aa + "/digit_margin");
    }
    if (j.contains("search_bound")) c.search_bound = ll_at(j["search_bound"], sub("search_bound"));
    if (j.contains("delta")) {
        c.delta = rational_from(j["delta"], sub("delta"));
        if (!(sgn(*c.delta) >= 0 && *c.delta < Rational(1, 2))) bad(sub("delta"), "delta must lie in [0, 1/2)");
    }
    if (j.contains("scan")) {
        const json& s = j["scan"];
        if (!s.is_object()) bad(sub("scan"), "expected an object");
        if (s.contains("start")) c.scan_start = ll_at(s["start"], sub("scan") + "/start");
        if (s.contains("count")) c.scan_count = ll_at(s["count"], sub("scan") + "/count");
    }
    if (j.contains("window")) {
        const json& w = j["window"];
        if (w.is_string()) {
            std::tie(c.window_a, c.window_b) = parse_window(w.get<std::string>(), sub("window"));
        } else if (w.is_array() && w.size() == 2) {
            c.window_a = ll_at(w[0], sub("window") + "/0");
            c.window_b = ll_at(w[1], sub("window") + "/1");
            if (c.window_a > c.window_b) bad(sub("window"), "window is empty");
        } else {
            bad(sub("window"), "expected \"a:b\" or [a, b]");
        }
    }
    if (j.contains("shift")) c.shift = ll_at(j["shift"], sub("shift"));
    if (j.contains("period_bound")) c.period_bound = size_at(j["period_bound"], sub("period_bound"));
    if (j.contains("census")) {
        const json& s = j["census"];
        const std::string as = sub("census");
        if (!s.is_object()) bad(as, "expected an object");
        if (s.contains("positions")) {
            if (!s["positions"].is_array()) bad(as + "/positions", "expected an array");
            for (std::size_t i = 0; i < s["positions"].size(); ++i)
                c.census_positions.push_back(integer_from(s["positions"][i], fmt::format("{}/positions/{}", as, i)));
        }
        if (s.contains("shift_bound")) c.census_bound = ll_at(s["shift_bound"], as + "/shift_bound");
    }
    if (j.contains("probes")) c.probes = size_at(j["probes"], sub("probes"));
    if (j.contains("seed")) {
        Integer z = integer_from(j["seed"], sub("seed"));
        if (sgn(z) < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 64) bad(sub("seed"), "seed must be an unsigned 64-bit integer");
        c.seed = std::stoull(z.get_str());
    }
    if (j.contains("plot_levels")) {
        const json& p = j["plot_levels"];
        if (!p.is_array()) bad(sub("plot_levels"), "expected an array");
        c.plot_levels.clear();
        for (std::size_t i = 0; i < p.size(); ++i)
            c.plot_levels.push_back(size_at(p[i], fmt::format("{}/{}", sub("plot_levels"), i)));
    }
    return c;
}

SemicocycleInstance build_instance(const RunConfig& cfg)
{
    if (!cfg.construction) throw ConfigError("config: missing field 'construction' (tame_nonnull or nontame)");
    if (*cfg.construction == Construction::tame_nonnull)
        return build_tame_nonnull(cfg.system, cfg.ladder, cfg.variant, cfg.s_max, cfg.anchor_search);
    return build_nontame(cfg.system, cfg.ladder, cfg.variant, cfg.anchor_search);
}

std::vector<std::string> probe_instance(const SemicocycleInstance& inst, std::size_t probes, std::uint64_t seed)
{
    std::vector<std::string> out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> far(-1000000, 1000000), near(-10000, 10000);
    const Point& x0 = inst.sys.theta0();
    for (std::size_t k = 0; k < probes && out.size() < 20; ++k) {
        long h = far(rng), t = near(rng), u = far(rng);
        try {
            ExactScalar v = value_at(inst, act(inst.sys, h, x0));
            if (!(v == evaluate(inst, h))) out.push_back(fmt::format("h={}: value_at and evaluate disagree", h));
            std::vector<GroupElement> w{GroupElement(h), GroupElement(h + 1)};
            std::vector<GroupElement> ws{GroupElement(h + t), GroupElement(h + t + 1)};
            Word a = word(inst, w, t), b = word(inst, ws, 0);
            for (std::size_t i = 0; i < a.size(); ++i)
                if (!(a[i].second == b[i].second))
                    out.push_back(fmt::format("h={} t={}: shifted word disagrees at offset {}", h, t, i));
            Point x = act(inst.sys, h, x0), y = act(inst.sys, u, inst.anchors.theta);
            if (!(dist(inst.sys, act(inst.sys, t, x), act(inst.sys, t, y)) == dist(inst.sys, x, y)))
                out.push_back(fmt::format("h={} u={} t={}: action is not isometric", h, u, t));
        } catch (const std::exception& e) {
            out.push_back(fmt::format("h={}: {}", h, e.what()));
        }
    }
    return out;
}

namespace {

struct Options {
    std::string config, out = "out", instance, cert;
    std::optional<std::uint64_t> seed;
    std::optional<long long> bound;
    std::optional<std::string> window;
    std::optional<std::size_t> depth;
};

class Runner {
public:
    Runner(const Options& o, std::ostream& out) : o_(o), out_(out)
    {
        if (!o.config.empty()) cfg_ = run_config_from(read_json_file(o.config), o.config + "#");
        if (o.seed) cfg_.seed = *o.seed;
        if (o.depth) cfg_.ladder.depth = *o.depth;
        if (o.window) std::tie(cfg_.window_a, cfg_.window_b) = parse_window(*o.window, "--window");
        std::filesystem::create_directories(o.out);
    }

    int run(const std::string& cmd)
    {
        if (cmd == "ladder") return ladder();
        if (cmd == "build") return build();
        if (cmd == "word") return word_cmd();
        if (cmd == "plot") return plot();
        if (cmd == "certify-nonnull") return certify(true);
        if (cmd == "certify-nontame") return certify(false);
        if (cmd == "verify") return verify();
        if (cmd == "tame-report") return tame_report();
        if (cmd == "toeplitz") return toeplitz();
        if (cmd == "census") return census();
        throw ConfigError("unknown subcommand " + cmd);
    }

private:
    std::string path(const std::string& name) const { return (std::filesystem::path(o_.out) / name).string(); }

    void emit(const std::string& name, const std::string& text)
    {
        write_text_file(path(name), text);
        out_ << "wrote " << path(name) << "\n";
    }

    SemicocycleInstance instance()
    {
        if (!o_.instance.empty()) return instance_from(read_json_file(o_.instance), o_.instance + "#");
        return build_instance(cfg_);
    }

    int ladder()
    {
        RadiiLadder L = build_ladder(cfg_.ladder);
        auto v = validate_ladder(L, cfg_.system);
        emit("ladder.json", dump_json(to_json(L), false));
        emit("ladder_report.json", dump_json(json{{"valid", v.empty()}, {"violations", to_json(v)}}));
        out_ << fmt::format("ladder: depth {}, level lengths {}..{}, {} violations\n", L.depth(), L.length(1),
                            L.length(L.depth()), v.size());
        for (const auto& x : v)
            out_ << fmt::format("  {} at ({},{}): {}\n", x.rule, x.level, x.index, x.detail);
        return v.empty() ? 0 : 1;
    }

    int build()
    {
        SemicocycleInstance inst = instance();
        auto problems = check_instance(inst);
        auto probes = probe_instance(inst, cfg_.probes, cfg_.seed);
        emit("instance.json", dump_json(to_json(inst), false));
        emit("build_report.json", dump_json(json{{"construction_checks", problems},
                                                 {"probes", cfg_.probes},
                                                 {"seed", cfg_.seed},
                                                 {"probe_failures", probes}}));
        out_ << fmt::format("build: {} {} instance, ladder depth {}, {} check problems, {} probe failures\n",
                            to_string(inst.construction), to_string(inst.variant), inst.depth(), problems.size(),
                            probes.size());
        for (const auto& p : problems)
            out_ << "  " << p << "\n";
        for (const auto& p : probes)
            out_ << "  " << p << "\n";
        return problems.empty() && probes.empty() ? 0 : 1;
    }

    int word_cmd()
    {
        SemicocycleInstance inst = instance();
        Word w = word(inst, window_range(cfg_.window_a, cfg_.window_b), GroupElement(static_cast<long>(cfg_.shift)));
        emit("word.csv", word_csv(w));
        return 0;
    }

    int plot()
    {
        RadiiLadder L = build_ladder(cfg_.ladder);
        emit("plot.csv", plot_csv(L, cfg_.variant, cfg_.plot_levels));
        emit("plot.svg", plot_svg(L, cfg_.variant, cfg_.plot_levels));
        return 0;
    }

    int certify(bool nonnull)
    {
        SemicocycleInstance inst = instance();
        long long bound = o_.bound.value_or(cfg_.search_bound);
        auto targets = default_targets(cfg_.delta);
        std::vector<std::size_t> sizes;
        std::optional<std::size_t> one = nonnull ? cfg_.s : cfg_.ell;
        std::size_t top = nonnull ? inst.s_max : inst.anchors.count();
        if (one)
            sizes.push_back(*one);
        else
            for (std::size_t k = 1; k <= top; ++k)
                sizes.push_back(k);
        for (auto k : sizes) {
            auto c = nonnull ? find_nonnull_certificate(inst, k, bound, targets)
                             : find_nontame_certificate(inst, k, bound, targets);
            Integer mx = 0;
            for (const auto& [key, h] : c.witnesses)
                if (abs(h) > mx) mx = abs(h);
            emit(fmt::format("certificate_{}_{}{}.json", nonnull ? "nonnull" : "nontame", nonnull ? "s" : "l", k),
                 dump_json(to_json(c)));
            out_ << fmt::format("{} = {}: {} patterns witnessed, max |h| = {}\n", nonnull ? "s" : "ell", k,
                                c.witnesses.size(), describe_size(mx));
        }
        return 0;
    }

    int verify()
    {
        if (o_.cert.empty()) throw ConfigError("--cert: verify needs a certificate file");
        SemicocycleInstance inst = instance();
        auto cert = certificate_from(read_json_file(o_.cert), o_.cert + "#");
        auto rep = verify_certificate(inst, cert);
        emit("verify_report.json", dump_json(to_json(rep)));
        for (const auto& p : rep.problems)
            out_ << "problem: " << p << "\n";
        for (const auto& f : rep.failures)
            out_ << fmt::format("FAIL pattern {} position {}: {}\n", f.pattern, f.position, f.detail);
        out_ << (rep.empty() ? "certificate valid\n" : "certificate INVALID\n");
        return rep.empty() ? 0 : 1;
    }

    int tame_report()
    {
        SemicocycleInstance inst = instance();
        long long count = o_.bound.value_or(cfg_.scan_count);
        auto rep = tameness_precondition_report(inst, GroupElement(static_cast<long>(cfg_.scan_start)), GroupElement(static_cast<long>(count)));
        emit("tame_report.json", dump_json(to_json(rep)));
        out_ << fmt::format("D_f {} ({} points, {} sphere families); theta0-orbit hits {}; free action: {}\n",
                            rep.df_finite ? "finite" : "countable", rep.df_points, rep.sphere_families,
                            rep.hits.theta0.size(), rep.free_action ? "yes" : "no");
        return 0;
    }

    int toeplitz()
    {
        SemicocycleInstance inst = instance();
        unsigned long long pb = o_.bound ? static_cast<unsigned long long>(*o_.bound) : cfg_.period_bound;
        auto rep = toeplitz_verify(inst, cfg_.window_a, cfg_.window_b, pb);
        emit("toeplitz.csv", toeplitz_csv(rep));
        emit("toeplitz_density.csv", toeplitz_density_csv(rep));
        bool monotone = std::is_sorted(rep.density.begin(), rep.density.end());
        emit("toeplitz_summary.json",
             dump_json(json{{"window", json::array({rep.a, rep.b})},
                            {"period_bound", pb},
                            {"positions", rep.period.size()},
                            {"verified", rep.verified_count()},
                            {"verified_fraction", to_json(Rational(Integer(static_cast<unsigned long>(rep.verified_count())),
                                                                   Integer(static_cast<unsigned long>(rep.period.size()))))},
                            {"density_nondecreasing", monotone},
                            {"shadow_level", rep.shadow_level},
                            {"unverified", rep.unverified},
                            {"unverified_outside_shadow", rep.unverified_outside_shadow}}));
        out_ << fmt::format("toeplitz: {} of {} positions verified; {} unverified outside the prefix shadow\n",
                            rep.verified_count(), rep.period.size(), rep.unverified_outside_shadow);
        return 0;
    }

    int census()
    {
        SemicocycleInstance inst = instance();
        std::vector<GroupElement> pos = cfg_.census_positions;
        if (pos.empty()) {
            if (inst.construction == Construction::tame_nonnull) {
                std::size_t s = cfg_.s.value_or(1), a = block_alpha(s);
                if (s < 1 || a + s >= inst.anchors.g.size()) throw PreconditionError("block outside the anchor range");
                pos.assign(inst.anchors.g.begin() + static_cast<long>(a + 1),
                           inst.anchors.g.begin() + static_cast<long>(a + s + 1));
            } else {
                std::size_t l = std::min(cfg_.ell.value_or(3), inst.anchors.count());
                pos.assign(inst.anchors.g.begin() + 1, inst.anchors.g.begin() + static_cast<long>(l + 1));
            }
        }
        long long bound = o_.bound.value_or(cfg_.census_bound);
        auto pats = pattern_census(inst, pos, bound, default_targets(cfg_.delta).v1);
        json jp = json::array();
        for (const auto& g : pos)
            jp.push_back(to_json(g));
        emit("census.json", dump_json(json{{"positions", jp}, {"shift_bound", bound}, {"patterns", pats}}));
        out_ << fmt::format("census: {} of {} patterns realised within |h| <= {}\n", pats.size(),
                            std::size_t(1) << pos.size(), bound);
        return 0;
    }

    Options o_;
    std::ostream& out_;
    RunConfig cfg_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"semicocycle extensions: construction, words, certificates"};
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed = 0;
    long long bound = 0;
    std::string window;
    std::size_t depth = 0;
    const std::vector<std::pair<std::string, std::string>> cmds{
        {"ladder", "build and validate a radii ladder"},
        {"build", "construct an instance and run the structural probes"},
        {"word", "emit the word over a window as CSV"},
        {"plot", "emit the profiles as CSV and SVG"},
        {"certify-nonnull", "non-null certificates for the tame instance"},
        {"certify-nontame", "non-tame certificates along the nested positions"},
        {"verify", "re-verify a certificate against an instance"},
        {"tame-report", "tameness precondition report"},
        {"toeplitz", "Toeplitz period verification (binary odometer)"},
        {"census", "realised patterns over a set of positions"}};
    for (const auto& [name, help] : cmds) {
        auto* sc = app.add_subcommand(name, help);
        sc->add_option("--config", o.config, "run configuration (JSON)");
        sc->add_option("--out", o.out, "output directory");
        sc->add_option("--seed", seed, "seed for sampled checks");
        sc->add_option("--bound", bound, "search or scan bound");
        sc->add_option("--window", window, "window a:b");
        sc->add_option("--depth", depth, "ladder depth");
        sc->add_option("--instance", o.instance, "instance JSON instead of building from the config");
        sc->add_option("--cert", o.cert, "certificate JSON (verify)");
    }
    std::vector<std::string> argv(args.rbegin(), args.rend() - 1);
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    CLI::App* sc = app.get_subcommands().front();
    if (sc->count("--seed")) o.seed = seed;
    if (sc->count("--bound")) o.bound = bound;
    if (sc->count("--window")) o.window = window;
    if (sc->count("--depth")) o.depth = depth;
    try {
        Runner r(o, out);
        return r.run(sc->get_name());
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

}  // namespace semico
