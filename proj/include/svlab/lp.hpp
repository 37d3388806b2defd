#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "svlab/behavior.hpp"

namespace svlab {

using Rational = boost::multiprecision::cpp_rational;

/// Exact value of a finite double.
Rational to_rational(double x);

inline constexpr std::size_t kDefaultLpColumnCap = 20'000;

/// min/max c.x subject to sparse linear rows and x >= 0.
struct LpProblem {
    enum class Sense { minimize, maximize };
    enum class RowKind { eq, le, ge };

    struct Row {
        std::vector<std::pair<std::size_t, double>> coefs;
        RowKind kind = RowKind::eq;
        double rhs = 0.0;
        std::string label;
    };

    std::size_t num_vars = 0;
    std::vector<double> objective;
    Sense sense = Sense::minimize;
    std::vector<Row> rows;
    /// When set, columns [0, M^N d^N) are the behavior entries P(r|s) at
    /// column s_index * d^N + r_index.
    std::optional<Scenario> behavior_scenario;

    std::size_t add_var() {
        objective.push_back(0.0);
        return num_vars++;
    }
    void add_row(Row r) { rows.push_back(std::move(r)); }

    /// Throws if a row references a missing column or holds a non-finite value.
    void validate() const;

    /// Plain-text dump: header line, objective, one line per row.
    std::string dump() const;
};

struct SolveOptions {
    bool exact = false;
    double pivot_tolerance = 1e-9;
    std::size_t max_iterations = 200'000;
    std::size_t column_cap = kDefaultLpColumnCap;
};

struct LpSolution {
    enum class Status { optimal, infeasible, unbounded, cap_exceeded };

    Status status = Status::infeasible;
    double objective = 0.0;
    std::vector<double> x;
    /// Row duals in the problem's own sense (d objective / d rhs).
    std::vector<double> duals;
    std::size_t iterations = 0;
    double primal_residual = 0.0;
    double dual_infeasibility = 0.0;
    double complementary_slackness = 0.0;
    double duality_gap = 0.0;
    /// Exact optimum when solved in rational mode.
    std::optional<Rational> exact_objective;
    std::optional<BehaviorTable> behavior;
    std::string message;
};

const char* to_string(LpSolution::Status s);

/// Two-phase tableau simplex with Bland's rule. Redundant equality rows are
/// tolerated. Throws Error on a numerical stall (iteration cap).
LpSolution solve(const LpProblem& p, const SolveOptions& opt = {});

}  // namespace svlab
