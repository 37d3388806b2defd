#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "svlab/behavior.hpp"
#include "svlab/functional.hpp"
#include "svlab/rng.hpp"

namespace svlab {

inline constexpr double kBehaviorCheckTolerance = 1e-9;
inline constexpr double kIdentityTolerance = 1e-12;

struct BasisMarginal {
    SettingTuple setting;
    double max_marginal = 0.0;
    bool pass = true;
};

/// Marginal bound check for one (N-1)-party subset.
struct MarginalReport {
    std::vector<int> subset;
    double epsilon = 0.0;
    /// 1/d^{N-1} + d (N-1) epsilon / 4.
    double bound = 0.0;
    double max_marginal = 0.0;
    std::vector<BasisMarginal> bases;
    bool pass = true;
};

/// One report per subset leaving out a single party, in order of the left-out
/// party. epsilon is the behavior's own Bell value.
std::vector<MarginalReport> check_theorem1(const BehaviorTable& b, const BellFunctional& f,
                                           double tol = kBehaviorCheckTolerance);

struct Eq13Result {
    double expectation = 0.0;  // sum_i i P(i)
    double rhs = 0.0;          // 1 - P(0)
    bool pass = true;
};

/// Mean of a dit against the probability that it is nonzero. Throws on a
/// negative or unnormalized input.
Eq13Result check_eq13(std::span<const double> dist, double tol = kIdentityTolerance);

struct AppendixCResult {
    /// Probability that the basis's term constraint holds.
    double lhs = 0.0;
    /// P(parties 1..N-1 = anchor).
    double first_marginal = 0.0;
    /// P(parties 2..N-1 = anchor[1..], party N = forced value).
    double second_marginal = 0.0;
    int forced_value = 0;
    /// 1 - |first_marginal - second_marginal|.
    double rhs = 0.0;
    bool pass = true;
};

/// Overlap bound at one inequality basis. `anchor` holds the outcomes of the
/// first N-1 parties; party N's value is the one forced by the term constraint.
AppendixCResult check_appendixC(const BehaviorTable& b, const BellFunctional& f, std::span<const int> basis,
                                std::span<const int> anchor, double tol = kIdentityTolerance);

struct GridDistanceSum {
    long long sum = 0;
    long long expected = 0;
};

/// sum_{i=D-}^{D+} |i| with D+ = (d-1)/2 = -D- (odd d) or D+ = d/2 = 1 - D- (even d),
/// next to (d^2-1)/4 or d^2/4.
GridDistanceSum grid_distance_sums(int d);

struct Eq10Report {
    /// Largest probability mass on outcomes violating the basis's term constraint.
    double max_violating_mass = 0.0;
    SettingTuple worst_basis;
};

Eq10Report check_eq10(const BehaviorTable& b, const BellFunctional& f);

/// Random point of the nonsignaling polytope on the full grid: a convex mixture
/// of `n_local` random local deterministic points and the ideal box (padded
/// with the uniform distribution off the bases), with Dirichlet(1) weights.
BehaviorTable random_nonsignaling_behavior(const Scenario& sc, CounterRng& rng, int n_local = 3);

/// Random full-grid behavior with independent rows; generally signaling.
BehaviorTable random_behavior(const Scenario& sc, CounterRng& rng);

/// Random distribution over 0..d-1 (normalized exponential weights).
std::vector<double> random_distribution(int d, CounterRng& rng);

}  // namespace svlab
