#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "svlab/scenario.hpp"

namespace svlab {

/// Conditional distribution P(outcomes | settings) on a full setting grid or a
/// sparse set of setting tuples. Rows are stored contiguously, d^N doubles per
/// supported setting, outcomes in row-major order. Immutable once built.
class BehaviorTable {
public:
    enum class Validation { checked, unchecked };

    /// `probs` has M^N * d^N entries, setting-major.
    static BehaviorTable full_grid(Scenario scenario, std::vector<double> probs,
                                   Tolerances tol = {}, Validation v = Validation::checked);

    /// `settings` are setting indices (see Scenario::setting_index); any order,
    /// no duplicates. `probs` has settings.size() * d^N entries in the same order.
    static BehaviorTable sparse(Scenario scenario, std::vector<std::uint64_t> settings,
                                std::vector<double> probs, Tolerances tol = {},
                                Validation v = Validation::checked);

    static BehaviorTable uniform(const Scenario& scenario);
    /// Local deterministic point: outcome table[k][x-1] for party k at setting x.
    static BehaviorTable deterministic(const Scenario& scenario,
                                       const std::vector<std::vector<int>>& table);

    const Scenario& scenario() const { return scenario_; }
    bool is_full_grid() const { return full_grid_; }
    std::span<const std::uint64_t> support() const { return support_; }
    bool supports(std::uint64_t setting_index) const;
    bool supports(std::span<const int> s) const;

    /// Row of d^N probabilities; throws Error naming the tuple when unsupported.
    std::span<const double> row(std::uint64_t setting_index) const;
    std::span<const double> row(std::span<const int> s) const;
    double probability(std::span<const int> s, std::span<const int> r) const;

    std::span<const double> raw() const { return probs_; }

private:
    BehaviorTable(Scenario scenario, std::vector<std::uint64_t> support, bool full_grid,
                  std::vector<double> probs);

    std::optional<std::size_t> position(std::uint64_t setting_index) const;

    Scenario scenario_;
    std::vector<std::uint64_t> support_;
    bool full_grid_;
    std::vector<double> probs_;
};

/// Distribution over the kept parties' outcomes at setting tuple `s`. `keep` is
/// a list of 0-based party indices; the result is indexed row-major over the
/// kept parties in ascending party order.
std::vector<double> marginalize(const BehaviorTable& b, std::span<const int> keep,
                                std::span<const int> s);

struct NormalizationReport {
    double max_deviation = 0.0;
    double most_negative = 0.0;
    SettingTuple worst_setting;
    bool pass = true;
};

NormalizationReport check_normalization(const BehaviorTable& b, Tolerances tol = {});

struct NonsignalingReport {
    double max_violation = 0.0;
    /// 0-based party whose setting change moved the others' marginal; -1 if none.
    int party = -1;
    /// Settings of the other parties where the worst violation occurred (party slot = 0).
    SettingTuple context;
    bool pass = true;
};

NonsignalingReport check_nonsignaling(const BehaviorTable& b, Tolerances tol = {});

/// New party i is old party perm[i].
BehaviorTable permute_parties(const BehaviorTable& b, std::span<const int> perm);

nlohmann::json to_json(const BehaviorTable& b);
BehaviorTable behavior_from_json(const nlohmann::json& j, Tolerances tol = {},
                                 BehaviorTable::Validation v = BehaviorTable::Validation::checked);

std::string party_name(int party);

}  // namespace svlab
