#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semico/semicocycle.hpp"

namespace semico {

// Closed value interval [lo, hi] inside [0, 1].
struct ValueSet {
    Rational lo;
    Rational hi;
    bool contains(const ExactScalar& x) const { return x >= lo && x <= hi; }
    friend bool operator==(const ValueSet&, const ValueSet&) = default;
};

struct IndependenceQuery {
    ValueSet v0{Rational(0), Rational(0)};
    ValueSet v1{Rational(1), Rational(1)};
    std::vector<GroupElement> positions;
    friend bool operator==(const IndependenceQuery&, const IndependenceQuery&) = default;
};

// V0 = {0}, V1 = {1}; with delta: [0, delta] and [1 - delta, 1].
IndependenceQuery default_targets(const std::optional<Rational>& delta = std::nullopt);

struct IndependenceCertificate {
    IndependenceQuery query;
    std::map<std::string, GroupElement> witnesses;  // pattern key -> shift h_a
    friend bool operator==(const IndependenceCertificate&, const IndependenceCertificate&) = default;
};

IndependenceCertificate find_nonnull_certificate(const SemicocycleInstance& inst, std::size_t s, long long search_bound,
                                                 const IndependenceQuery& targets = default_targets());
IndependenceCertificate find_nontame_certificate(const SemicocycleInstance& inst, std::size_t ell,
                                                 long long search_bound,
                                                 const IndependenceQuery& targets = default_targets());

struct VerificationFailure {
    std::string pattern;
    std::size_t position = 0;  // 1-based index into the positions
    std::string detail;
};

struct VerificationReport {
    std::vector<std::string> problems;  // structural: targets, positions, missing patterns
    std::vector<VerificationFailure> failures;
    bool empty() const { return problems.empty() && failures.empty(); }
};

// Re-evaluates every (pattern, position) pair through evaluate() only.
VerificationReport verify_certificate(const SemicocycleInstance& inst, const IndependenceCertificate& cert);

struct TamenessReport {
    bool df_finite = true;
    std::size_t df_points = 0;
    std::size_t sphere_families = 0;
    GroupElement scan_start;
    GroupElement scan_count;
    OrbitHitReport hits;
    std::size_t families_hit = 0;
    std::size_t max_hits_per_family = 0;
    std::size_t family_solution_bound = 0;  // rotation: each family is met by at most this many h
    bool free_action = false;
    std::string freeness;
    // rotation: Z alpha + r pairwise disjoint over distinct stored radii
    std::optional<bool> residues_disjoint;
    std::size_t distinct_radii = 0;
};

TamenessReport tameness_precondition_report(const SemicocycleInstance& inst, const GroupElement& scan_start,
                                            const GroupElement& scan_count);

// indicator(evaluate(g_i + h) in V1) for |h| <= shift_bound
std::set<std::string> pattern_census(const SemicocycleInstance& inst, const std::vector<GroupElement>& positions,
                                     long long shift_bound, const ValueSet& v1 = {Rational(1), Rational(1)});

struct ToeplitzReport {
    long long a = 0;
    long long b = 0;
    std::vector<unsigned long long> moduli;  // candidate periods n_k <= period bound
    std::vector<unsigned long long> period;  // per position; 0 = unverified
    std::vector<Rational> density;            // per modulus
    std::size_t shadow_level = 0;             // largest k with n_k <= ceil((b - a) / 2)
    std::vector<long long> unverified;
    std::size_t unverified_outside_shadow = 0;
    std::size_t verified_count() const { return period.size() - unverified.size(); }
};

ToeplitzReport toeplitz_verify(const SemicocycleInstance& inst, long long a, long long b,
                               unsigned long long period_bound);

}  // namespace semico
