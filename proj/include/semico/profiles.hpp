#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "semico/exact.hpp"
#include "semico/ladder.hpp"

namespace semico {

enum class ProfileVariant { continuous, binary };

std::string to_string(ProfileVariant v);
ProfileVariant variant_from_string(const std::string& s);

// cell j of level n is [r_{j+1}^n, r_j^n]
struct CellRef {
    std::size_t level = 0;
    std::size_t index = 0;
    Rational lo;
    Rational hi;
    friend bool operator==(const CellRef&, const CellRef&) = default;
};

CellRef cell(const RadiiLadder& L, std::size_t n, std::size_t j);

// 1 on j = 2 mod 4, 0 on j = 0 mod 4, -1 on ramps (odd j)
int plateau_value(std::size_t j);
// f_n at r_i^n
int node_value(std::size_t i);

ExactScalar eval_profile(const RadiiLadder& L, ProfileVariant v, std::size_t n, const ExactScalar& x);

// A bit-vector a in {0,1}^s, a_1 first. Stored with a_k at bit k-1.
struct Pattern {
    std::uint32_t bits = 0;
    std::size_t length = 0;
    int operator[](std::size_t k) const { return (bits >> k) & 1u; }  // 0-based
    std::string key() const;                                           // "a_1 a_2 ... a_s"
    static Pattern from_key(const std::string& key);
    friend bool operator==(const Pattern&, const Pattern&) = default;
};

// Every level-(alpha+s) cell on which f_{alpha+1..alpha+s} are all constant, with the pattern.
struct CellPattern {
    std::size_t index;
    std::uint32_t bits;
};
std::vector<CellPattern> classify_cells(const RadiiLadder& L, ProfileVariant v, std::size_t alpha, std::size_t s);

CellRef free_interval(const RadiiLadder& L, ProfileVariant v, std::size_t alpha, const Pattern& a);
// One cell per pattern, indexed by Pattern::bits (a single sweep instead of 2^s).
std::vector<CellRef> free_intervals(const RadiiLadder& L, ProfileVariant v, std::size_t alpha, std::size_t s);

inline std::size_t block_alpha(std::size_t s) { return s * (s - 1) / 2; }

struct BlockLayout {
    std::size_t s = 0;
    std::size_t alpha = 0;
    std::size_t level = 0;     // alpha(s+1) = alpha + s
    // J_s = [lo, hi]: the nearest radii of levels alpha+1..alpha+s outside the hull of all
    // realizing level-(alpha+s) cells at which every profile of the block vanishes
    Rational lo;
    Rational hi;
    std::vector<CellPattern> cells;  // every realizing cell inside J_s

    bool contains(const ExactScalar& x) const { return x >= lo && x <= hi; }
    friend bool operator==(const BlockLayout& a, const BlockLayout& b)
    {
        return a.s == b.s && a.alpha == b.alpha && a.level == b.level && a.lo == b.lo && a.hi == b.hi;
    }
};

BlockLayout block_layout(const RadiiLadder& L, ProfileVariant v, std::size_t s);

// bar f_n: f_n on J_s (n in block s), 0 elsewhere
ExactScalar eval_bar(const RadiiLadder& L, ProfileVariant v, const BlockLayout& block, std::size_t n,
                     const ExactScalar& x);

// CSV of f_n at every cell endpoint and midpoint for the listed levels.
std::string plot_csv(const RadiiLadder& L, ProfileVariant v, const std::vector<std::size_t>& levels);
// Lossy SVG rendering; coordinates are floating point.
std::string plot_svg(const RadiiLadder& L, ProfileVariant v, const std::vector<std::size_t>& levels);

}  // namespace semico
