#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semico/base_systems.hpp"
#include "semico/exact.hpp"
#include "semico/ladder.hpp"
#include "semico/profiles.hpp"

namespace semico {

enum class Construction { tame_nonnull, nontame };

std::string to_string(Construction c);
Construction construction_from_string(const std::string& s);

struct AnchorSet {
    Point theta;
    std::optional<Point> theta_prime;  // non-tame only
    std::vector<GroupElement> g;       // g[0] = 0 (identity), g[n] for n >= 1
    std::optional<ExactScalar> r;      // separation radius, non-tame only

    std::size_t count() const { return g.empty() ? 0 : g.size() - 1; }
    friend bool operator==(const AnchorSet&, const AnchorSet&) = default;
};

struct SemicocycleInstance {
    Construction construction = Construction::tame_nonnull;
    BaseSystem sys;
    RadiiLadder ladder;
    ProfileVariant variant = ProfileVariant::continuous;
    AnchorSet anchors;
    std::size_t s_max = 0;            // tame only
    std::vector<BlockLayout> blocks;  // tame only, blocks[s-1]

    // derived by prepare(); never serialized
    std::vector<Point> centres;     // centres[n] = g_n theta (centres[0] = theta)
    std::vector<double> centre_x;   // rotation: approximate centre positions
    std::vector<double> top_x;      // approximate r_1^n
    std::vector<int> block_of;      // block index s for level n, 0 when outside every block

    std::size_t depth() const { return ladder.depth(); }
    friend bool operator==(const SemicocycleInstance& a, const SemicocycleInstance& b)
    {
        return a.construction == b.construction && a.sys == b.sys && a.ladder == b.ladder &&
               a.variant == b.variant && a.anchors == b.anchors && a.s_max == b.s_max && a.blocks == b.blocks;
    }
};

// Fills the derived fields. Called by the builders and by deserialization.
void prepare(SemicocycleInstance& inst);

struct AnchorSearch {
    long candidate_bound = 20000;  // rotation anchors are k*alpha with 0 < |k| <= bound
    std::size_t digit_margin = 16;  // odometer: digits stored beyond the deepest radius
};

// Ladder depth must be at least alpha(s_max + 1); anchors are chosen for every level.
SemicocycleInstance build_tame_nonnull(const BaseSystem& sys, const LadderParams& lp, ProfileVariant v,
                                       std::size_t s_max, const AnchorSearch& search = {});
SemicocycleInstance build_nontame(const BaseSystem& sys, const LadderParams& lp, ProfileVariant v,
                                  const AnchorSearch& search = {});

// Exact re-check of every construction side condition; empty means all hold.
std::vector<std::string> check_instance(const SemicocycleInstance& inst);

struct Evaluation {
    bool on_theta_set = false;  // omega = theta (tame) or omega in Theta (non-tame)
    // nonzero summands: index 0 is the f_1(rho(omega, theta')) term, n >= 1 the g_n term
    std::vector<std::pair<std::size_t, ExactScalar>> active;
    ExactScalar value;
};

Evaluation evaluate_detail(const SemicocycleInstance& inst, const Point& omega);
// f(omega); asserts the range and single-active-summand invariants
ExactScalar value_at(const SemicocycleInstance& inst, const Point& omega);
// f(h . theta0)
ExactScalar evaluate(const SemicocycleInstance& inst, const GroupElement& h);

using Word = std::vector<std::pair<GroupElement, ExactScalar>>;
// (g, f((g + shift) . theta0)) for g in the window, in window order
Word word(const SemicocycleInstance& inst, const std::vector<GroupElement>& window, const GroupElement& shift = 0);
std::vector<GroupElement> window_range(long long a, long long b);

struct SphereFamily {
    std::size_t anchor = 0;  // 0: theta', n >= 1: g_n theta
    std::size_t level = 0;
    std::size_t index = 0;   // radius r_index^level
    Rational radius;
};

struct DiscontinuityDescriptor {
    std::vector<Point> points;          // theta, or Theta = {g_n theta} and theta'
    std::vector<std::size_t> point_anchor;  // anchor index per point, theta' reported as npos
    std::vector<SphereFamily> spheres;  // rotation binary variants only
    bool finite = true;                 // finite by construction (else countable)
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

DiscontinuityDescriptor discontinuities(const SemicocycleInstance& inst);
bool is_discontinuity(const SemicocycleInstance& inst, const DiscontinuityDescriptor& d, const Point& x);
// odometer: x agrees with some point of the descriptor on its first k digits
bool in_prefix_shadow(const DiscontinuityDescriptor& d, const OdometerPoint& x, std::size_t k);

struct OrbitHit {
    GroupElement h;
    std::size_t anchor = 0;        // sphere: family anchor; point: DiscontinuityDescriptor::point_anchor
    std::optional<std::size_t> sphere;  // index into DiscontinuityDescriptor::spheres
    int sign = 0;                  // sphere side, +1 or -1
};

struct OrbitHitReport {
    std::vector<OrbitHit> theta0;
    std::vector<OrbitHit> theta;
    std::vector<OrbitHit> theta_prime;
};

// Incidences of h . base with D_f for h in [h0, h0 + count), solved exactly.
std::vector<OrbitHit> orbit_hits(const SemicocycleInstance& inst, const DiscontinuityDescriptor& d,
                                 const Point& base, const GroupElement& h0, const GroupElement& count);
OrbitHitReport orbit_hits(const SemicocycleInstance& inst, const GroupElement& h0, const GroupElement& count);

// Canonical representative of x modulo Z + Z alpha (rotation).
std::pair<Rational, Rational> residue_key(const ExactScalar& alpha, const ExactScalar& x);

// Integer value of an odometer point with an exact tail; nullopt for opaque tails.
std::optional<Integer> odometer_value(const BaseSystem& sys, const OdometerPoint& p);

}  // namespace semico
