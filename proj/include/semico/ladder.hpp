#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semico/base_systems.hpp"
#include "semico/exact.hpp"

namespace semico {

enum class BaseKind { rotation_rationals, odometer_dyadic };

std::string to_string(BaseKind k);
BaseKind base_kind_from_string(const std::string& s);

struct RadiiLadder {
    BaseKind base_kind = BaseKind::rotation_rationals;
    Rational tail_ratio{1, 2};                // generated ladders satisfy r_1^n <= tail_ratio^n
    std::vector<std::vector<Rational>> levels;  // levels[n-1][i-1] = r_i^n
    std::vector<std::size_t> links;             // links[n-1] = m_n, one per level transition

    std::size_t depth() const { return levels.size(); }
    std::size_t length(std::size_t n) const { return levels.at(n - 1).size(); }
    const Rational& r(std::size_t n, std::size_t i) const { return levels.at(n - 1).at(i - 1); }
    const std::vector<Rational>& level(std::size_t n) const { return levels.at(n - 1); }

    friend bool operator==(const RadiiLadder&, const RadiiLadder&) = default;
};

struct LadderParams {
    BaseKind base_kind = BaseKind::rotation_rationals;
    std::size_t depth = 1;
    std::size_t level_length = 8;
    // Link choice. An explicit schedule wins; otherwise `geometric` gives m_n = 4*5^n + 1,
    // and the default picks the smallest admissible m_n in 4N+1 (m_n >= 5).
    std::vector<std::size_t> m_schedule;
    bool geometric = false;
    std::size_t max_level_length = 0;  // 0: unbounded; caps the automatic schedule

    Rational tail_ratio{1, 2};
    // explicit level-1 radii (rotation); empty means unit fractions 1/d_i with
    // geometric growth of d_i down to about 2^-(depth+1)
    std::vector<Rational> level_one;
    // the two inserted values sit at lo + t*(hi - lo), t in {split_low, split_high}
    Rational split_low{1, 3};
    Rational split_high{2, 3};

    // odometer: uniform exponent spacing (level-1 radii 2^{-c k}); unset means the
    // spacing is pre-sized per gap to the insertions the schedule will make
    std::optional<long> spacing;
    long min_spacing = 5;
};

// Called with (n+1, m, candidate r_1^{n+1}) while choosing m_n; returning false rejects
// the candidate and moves on to m_n + 4.
using LinkAcceptor = std::function<bool(std::size_t, std::size_t, const Rational&)>;

// Builds levels one at a time, so callers can interleave anchor choices with linking.
class LadderBuilder {
public:
    explicit LadderBuilder(const LadderParams& params);

    const RadiiLadder& ladder() const { return ladder_; }
    std::size_t depth() const { return ladder_.depth(); }
    // Appends level depth()+1. Throws DepthError if no admissible link exists.
    std::size_t extend(const LinkAcceptor& accept = {});

private:
    LadderParams params_;
    RadiiLadder ladder_;
};

RadiiLadder build_ladder(const LadderParams& params);
RadiiLadder build_ladder(BaseKind kind, std::size_t depth, std::size_t level_length,
                         const std::vector<std::size_t>& m_schedule = {});

// Next level from level n with link m (shared by builder and tests).
std::vector<Rational> next_level(const std::vector<Rational>& level, std::size_t m, const Rational& t_low,
                                 const Rational& t_high);
std::size_t next_level_length(std::size_t length, std::size_t m);

std::vector<Rational> default_level_one(std::size_t depth, std::size_t length);

struct Violation {
    std::string rule;
    std::size_t level = 0;
    std::size_t index = 0;
    std::string detail;
};

std::vector<Violation> validate_ladder(const RadiiLadder& L, const BaseSystem& sys);

// exponent k of a radius 2^{-k}; nullopt when the radius is not a power of 1/2
std::optional<unsigned long> dyadic_exponent(const Rational& r);

}  // namespace semico
