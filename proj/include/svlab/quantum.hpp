#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "svlab/behavior.hpp"
#include "svlab/functional.hpp"
#include "svlab/scenario.hpp"

namespace svlab {

/// Measurement basis of one party on the GHZ state. Eigenstate r at setting e:
///   |r_e> = d^{-1/2} sum_q exp(i 2pi/d * sign * q * (r - phase(e))) |q>
/// with phase(e) = (2e - twice_shift) / (2M).
struct PartyBasisConvention {
    enum class Role { first, second, later };

    Role role = Role::first;
    int phase_sign = 1;
    /// 1 for the first party ((e-1/2)/M), 0 for the second (e/M), 2 after that ((e-1)/M).
    int twice_shift = 1;

    static PartyBasisConvention for_party(int party);

    /// Numerator of phase(e) over the common denominator 2M.
    long long phase_numerator(int setting) const { return 2LL * setting - twice_shift; }
};

/// N-party, dimension-d GHZ state measured in chained Fourier-type bases.
class QuantumModel {
public:
    explicit QuantumModel(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }
    const std::vector<PartyBasisConvention>& conventions() const { return conventions_; }

private:
    Scenario scenario_;
    std::vector<PartyBasisConvention> conventions_;
};

/// Explicit d-term amplitude sum over the GHZ components (the oracle path).
double joint_probability_direct(const QuantumModel& qm, std::span<const int> s, std::span<const int> r);

/// Geometric-sum closed form |1-e^{i d theta}|^2 / |1-e^{i theta}|^2 / d^{N+1}.
double joint_probability(const QuantumModel& qm, std::span<const int> s, std::span<const int> r);

enum class QuantumSupport { full_grid, inequality_bases };

/// Behavior of the model on the full grid or on the inequality bases only.
/// Rows are filled in parallel; the output does not depend on the schedule.
BehaviorTable quantum_behavior(const QuantumModel& qm, QuantumSupport support);

/// pi^2/(4 d^2 M) * sum_{i=1}^{d-1} i / sin^2(pi i / d).
double large_m_approximation(int n_settings, int n_outcomes);

struct ConvergenceRow {
    int m = 0;
    double exact = 0.0;
    double approximation = 0.0;
    double ratio = 0.0;
};

struct ConvergenceTable {
    int parties = 0;
    int outcomes = 0;
    std::vector<ConvergenceRow> rows;
    bool strictly_decreasing = true;
    /// Least-squares slope of log(exact) against log(M).
    double loglog_slope = 0.0;
    /// exact * M at the largest M.
    double fitted_constant = 0.0;
};

double quantum_bell_value(int n_parties, int n_settings, int n_outcomes);

ConvergenceTable bell_value_vs_m(int n_parties, int n_outcomes, std::span<const int> m_list);

double loglog_slope(std::span<const double> x, std::span<const double> y);

/// max over N in the list of |value(N=2) - value(N)|.
double check_eq9_equality(int n_outcomes, int n_settings, std::span<const int> n_list);

}  // namespace svlab
