#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "semico/exact.hpp"

namespace semico {

// Closed distance band lo <= rho(x, centre) <= hi, reported under `tag`.
struct DistanceTarget {
    Rational lo;
    Rational hi;
    std::size_t tag = 0;
};

// For each tag, the first h in the order 0, 1, -1, 2, -2, ... (|h| <= bound) with
// rho(x0 + h alpha, centre) inside one of the tag's bands. Positions are tracked in
// 128-bit fixed point; anything within a guard band of an endpoint is decided exactly.
std::vector<std::optional<long long>> scan_distance_targets(const ExactScalar& alpha, const ExactScalar& x0,
                                                            const ExactScalar& centre,
                                                            const std::vector<DistanceTarget>& targets,
                                                            std::size_t tag_count, long long bound);

}  // namespace semico
