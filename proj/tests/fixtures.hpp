#pragma once

#include <map>
#include <random>
#include <string>

#include "semico/cli.hpp"
#include "semico/serialize.hpp"

namespace fixtures {

inline semico::RunConfig config(const std::string& name)
{
    std::string path = std::string(SEMICO_CONFIG_DIR) + "/" + name;
    return semico::run_config_from(semico::read_json_file(path), path + "#");
}

// Instances are expensive enough to build once per process.
inline const semico::SemicocycleInstance& instance(const std::string& name)
{
    static std::map<std::string, semico::SemicocycleInstance> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, semico::build_instance(config(name))).first;
    return it->second;
}

// Hand-rolled generators for the property tests.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
    semico::Rational rational(long num = 1000, long den = 1000)
    {
        semico::Rational r(semico::Integer(integer(-num, num)), semico::Integer(integer(1, den)));
        r.canonicalize();
        return r;
    }
    semico::Rational unit_rational(long den = 100000)
    {
        long q = integer(1, den);
        semico::Rational r(semico::Integer(integer(0, q - 1)), semico::Integer(q));
        r.canonicalize();
        return r;
    }
    semico::ExactScalar scalar(long d)
    {
        if (integer(0, 4) == 0) return semico::ExactScalar(rational());
        return semico::ExactScalar(rational(), rational(50, 50), d);
    }
};

}  // namespace fixtures
