#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "svlab/functional.hpp"

namespace svlab {

inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

/// Outcome of each party for each of its settings: table[party][setting-1].
using LocalDeterministicStrategy = std::vector<std::vector<int>>;

struct LocalMinimum {
    /// Exact minimum is weight_sum / M^{N-2}.
    long long weight_sum = 0;
    double minimum = 0.0;
    std::uint64_t evaluations = 0;
    /// Position of the witness in lexicographic strategy order.
    std::uint64_t witness_index = 0;
    LocalDeterministicStrategy witness;
};

/// A two-group model: each group answers its joint settings with an arbitrary
/// joint outcome (signaling inside the group allowed).
struct BilocalDeterministicStrategy {
    std::vector<int> group;       // 0-based parties, contains party 0
    std::vector<int> complement;  // the other parties
    /// group_answers[g][j]: outcome tuple of group g's parties for its j-th joint
    /// setting (row-major over the group's parties, 0-based settings).
    std::vector<std::vector<OutcomeTuple>> group_answers;
};

struct BipartitionMinimum {
    std::vector<int> group;
    std::vector<int> complement;
    long long weight_sum = 0;
    double minimum = 0.0;
    std::uint64_t evaluations = 0;
    std::uint64_t witness_index = 0;
    BilocalDeterministicStrategy witness;
};

struct BilocalMinimum {
    long long weight_sum = 0;
    double minimum = 0.0;
    std::uint64_t evaluations = 0;
    std::size_t witness_bipartition = 0;
    std::vector<BipartitionMinimum> per_bipartition;
};

/// Every bipartition {G, complement} with party 0 in G, in increasing bitmask order.
std::vector<std::vector<int>> bipartitions(int n_parties);

std::uint64_t local_strategy_count(const BellFunctional& f);
std::uint64_t bilocal_strategy_count(const BellFunctional& f, const std::vector<int>& group);

LocalMinimum min_local(const BellFunctional& f, std::uint64_t cap = kDefaultEnumerationCap);

/// Minimum over all bipartitions, or only over `only_group` when given.
BilocalMinimum min_bilocal(const BellFunctional& f, std::uint64_t cap = kDefaultEnumerationCap,
                           const std::optional<std::vector<int>>& only_group = std::nullopt);

struct GapReport {
    double classical_minimum = 0.0;
    double bilocal_minimum = 0.0;
    double quantum_value = 0.0;
    std::optional<double> nonsignaling_minimum;
    /// 0 < quantum < d - 1.
    bool quantum_strictly_inside = false;
};

GapReport gap_report(const BellFunctional& f, const LocalMinimum& local, const BilocalMinimum& bilocal,
                     double quantum_value, std::optional<double> nonsignaling_minimum);

nlohmann::json to_json(const LocalDeterministicStrategy& s);
nlohmann::json to_json(const BilocalDeterministicStrategy& s);
nlohmann::json to_json(const GapReport& g);

}  // namespace svlab
