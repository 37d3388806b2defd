#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "svlab/behavior.hpp"
#include "svlab/functional.hpp"
#include "svlab/lp.hpp"

namespace svlab {

/// Setting grid with a per-party number of settings (used for the polytope
/// extended by an eavesdropper with a single setting).
struct GridShape {
    std::vector<int> settings;
    int outcomes = 2;

    static GridShape of(const Scenario& sc);
    int parties() const { return static_cast<int>(settings.size()); }
    std::uint64_t setting_count() const;
    std::uint64_t outcome_count() const;
    std::uint64_t column(std::uint64_t setting_index, std::uint64_t outcome_index) const {
        return setting_index * outcome_count() + outcome_index;
    }
};

/// Adds P(r|s) >= 0 columns for every grid point, normalization rows and the
/// one-party nonsignaling equalities (each setting x >= 2 of party k compared
/// against setting 1). Returns the first column of the block.
std::size_t add_nonsignaling_block(LpProblem& lp, const GridShape& shape);

/// Unscaled Bell row coefficients: sum_terms w(r) P(r|s_term); the functional
/// equals this sum divided by M^{N-2}.
std::vector<std::pair<std::size_t, double>> bell_coefficients(const BellFunctional& f, std::size_t base_column = 0);

/// Normalization and nonsignaling polytope of the scenario, objective unset.
LpProblem nonsignaling_polytope(const Scenario& sc);

struct NsOptions {
    SolveOptions solve;
    Tolerances check{1e-8, 1e-8};
};

/// Fills LpSolution::behavior from the first M^N d^N columns.
void attach_behavior(LpSolution& sol, const Scenario& sc, const Tolerances& tol);

struct MinBellResult {
    LpSolution lp;
    double value = 0.0;
    /// Largest |marginal - 1/d^{N-1}| over all (N-1)-party marginals on inequality bases.
    double marginal_deviation = 0.0;
};

/// Minimize the unscaled Bell row over the polytope.
LpProblem min_bell_problem(const Scenario& sc);

MinBellResult min_bell_ns(const Scenario& sc, const NsOptions& opt = {});

/// 1/d^{N-1} on the outcome tuples with vanishing term weight, per inequality
/// basis. With `fill_uniform`, settings that are not bases get the uniform
/// distribution so the table covers the full grid.
BehaviorTable ideal_box(const Scenario& sc, bool fill_uniform = false);

/// Same box with exact rational entries, keyed by setting index.
std::map<std::uint64_t, std::vector<Rational>> ideal_box_exact(const Scenario& sc);

/// Exact Bell value of a rational behavior that supports every basis.
Rational evaluate_exact(const BellFunctional& f, const std::map<std::uint64_t, std::vector<Rational>>& rows);

struct Theorem1Point {
    double epsilon = 0.0;
    double lp_value = 0.0;
    double bound = 0.0;
    LpSolution::Status status = LpSolution::Status::infeasible;
    bool within_bound = false;
};

/// 1/d^{N-1} + d (N-1) eps / 4.
double theorem1_bound(const Scenario& sc, double epsilon);

/// LP of one theorem1_probe grid point.
LpProblem theorem1_problem(const Scenario& sc, int excluded_party, std::span<const int> setting,
                           std::span<const int> target, double epsilon);

/// Maximizes P(r_S = target | s) over nonsignaling behaviors with I <= eps,
/// where S is every party except `excluded_party`, `s` an inequality basis and
/// `target` the N-1 outcomes of S in party order. Grid points run in parallel.
std::vector<Theorem1Point> theorem1_probe(const Scenario& sc, int excluded_party, std::span<const int> setting,
                                          std::span<const int> target, std::span<const double> eps_grid,
                                          const NsOptions& opt = {});

struct MonogamyResult {
    LpSolution lp;
    double guessing_probability = 0.0;
};

LpProblem monogamy_problem(const BehaviorTable& fixed, int target_party, std::span<const int> setting);

/// Largest probability that a single-setting eavesdropper with d outcomes
/// guesses `target_party`'s outcome at `setting`, over nonsignaling
/// extensions whose N-party marginal equals `fixed` on its support.
MonogamyResult monogamy_probe(const BehaviorTable& fixed, int target_party, std::span<const int> setting,
                              const NsOptions& opt = {});

struct UniquenessResult {
    std::size_t unknowns = 0;
    std::size_t equations = 0;
    std::size_t rank = 0;
    bool consistent = true;
    bool unique = false;
    /// Only meaningful when unique.
    bool equals_ideal_box = false;
    std::vector<Rational> solution;
};

/// Rank analysis of the single-basis linear system: zero constraints on
/// outcomes violating the basis's term, every (N-1)-party marginal pinned to
/// 1/d^{N-1} (unless `pin_marginals` is false), and normalization.
UniquenessResult uniqueness_check(const Scenario& sc, std::span<const int> basis, bool pin_marginals = true);

}  // namespace svlab
