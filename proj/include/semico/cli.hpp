#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "semico/certificates.hpp"
#include "semico/ladder.hpp"
#include "semico/semicocycle.hpp"
#include "semico/serialize.hpp"

namespace semico {

struct RunConfig {
    BaseSystem system = BaseSystem::rotation(golden_alpha());
    LadderParams ladder;
    std::optional<Construction> construction;
    ProfileVariant variant = ProfileVariant::continuous;
    std::size_t s_max = 6;
    std::optional<std::size_t> s;    // certify-nonnull / census: a single block
    std::optional<std::size_t> ell;  // certify-nontame / census: a single length
    AnchorSearch anchor_search;
    long long search_bound = 1000000;
    std::optional<Rational> delta;
    long long scan_start = -50000;
    long long scan_count = 100001;
    long long window_a = -100;
    long long window_b = 100;
    long long shift = 0;
    unsigned long long period_bound = 65536;
    std::vector<GroupElement> census_positions;
    long long census_bound = 1000;
    std::size_t probes = 10000;
    std::uint64_t seed = 1;
    std::vector<std::size_t> plot_levels{1, 2};
};

// `at` prefixes every error location (typically "file#").
RunConfig run_config_from(const json& j, const std::string& at);

SemicocycleInstance build_instance(const RunConfig& cfg);

// Seeded structural probes: value range and single-summand (via value_at), word
// equivariance and isometry along the probed orbit points. Returns the failures.
std::vector<std::string> probe_instance(const SemicocycleInstance& inst, std::size_t probes, std::uint64_t seed);

// Full command line including the program name; returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace semico
