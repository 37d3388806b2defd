#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "svlab/behavior.hpp"
#include "svlab/functional.hpp"

namespace svlab {

enum class SourceKind { quantum, ideal_box, file };

const char* to_string(SourceKind k);
SourceKind source_from_string(const std::string& s);

struct ProtocolConfig {
    Scenario scenario{3, 2, 2};
    std::uint64_t rounds = 1;
    std::uint64_t seed = 0;
    SourceKind source = SourceKind::quantum;
    /// Required for SourceKind::file; must match `scenario`.
    std::optional<BehaviorTable> behavior;

    /// Throws Error unless N >= 3, rounds >= 1 and the file source is present.
    void validate() const;
};

/// Source behavior for the configuration: full-grid GHZ, the ideal box on the
/// inequality bases, or the supplied table.
BehaviorTable protocol_source(const ProtocolConfig& cfg);

struct TermEstimate {
    std::uint64_t samples = 0;
    double mean = 0.0;
    double variance = 0.0;  // sample variance of the term weight
};

struct ProtocolTranscript {
    Scenario scenario{3, 2, 2};
    std::uint64_t seed = 0;
    SourceKind source = SourceKind::quantum;
    /// True when the source is sparse and settings were drawn from its support.
    bool settings_restricted = false;

    // Per round.
    std::vector<std::uint64_t> setting_index;
    std::vector<std::uint64_t> outcome_index;
    std::vector<std::uint8_t> sifted;
    /// Receivers' reconstruction of party 1's dit; -1 on unsifted rounds.
    std::vector<int> reconstructed;

    // Aggregates.
    std::uint64_t rounds = 0;
    std::uint64_t sifted_rounds = 0;
    std::uint64_t errors = 0;
    double sift_rate = 0.0;
    double error_rate = 0.0;
    /// counts[party][outcome] over sifted rounds.
    std::vector<std::vector<std::uint64_t>> marginal_counts;
    /// One entry per functional term, in term order.
    std::vector<TermEstimate> terms;
    std::vector<std::size_t> missing_terms;
    /// Sum of per-term means over M^{N-2}; absent terms contribute nothing.
    double bell_estimate = 0.0;
    double bell_standard_error = 0.0;

    /// round,settings,outcomes,sifted,reconstructed,error
    std::string rounds_csv() const;
};

struct RoundResult {
    std::uint64_t setting_index = 0;
    std::uint64_t outcome_index = 0;
    bool sifted = false;
    int reconstructed = -1;
};

/// One round from its own counter stream; shared by the parallel and the
/// serial drivers.
RoundResult simulate_round(const BellFunctional& f, const BehaviorTable& source, std::uint64_t seed,
                           std::uint64_t round);

/// Aggregates per-round results (in round order) into a transcript.
ProtocolTranscript summarize_rounds(const ProtocolConfig& cfg, const BellFunctional& f,
                                    const BehaviorTable& source, const std::vector<RoundResult>& rounds);

/// Simulates the rounds in parallel. Round i draws from CounterRng(seed, i):
/// N setting draws (or one support draw for a sparse source), then one uniform
/// for the outcome. The transcript is identical for any thread count.
ProtocolTranscript run_protocol(const ProtocolConfig& cfg);
ProtocolTranscript run_protocol(const ProtocolConfig& cfg, const BehaviorTable& source);

inline constexpr std::uint64_t kMinSiftedRounds = 100;
inline constexpr double kInsecurePValue = 1e-6;

struct UniformityTest {
    std::vector<int> parties;
    std::vector<double> frequencies;
    double chi_square = 0.0;
    int dof = 0;
    double p_value = 1.0;
    /// Largest |f - 1/d^k| in units of the binomial standard deviation.
    double max_sigma = 0.0;
    bool within_3_sigma = true;
};

struct SecurityReport {
    std::uint64_t sifted_rounds = 0;
    std::vector<UniformityTest> single_party;
    std::vector<UniformityTest> subsets;
    double bell_estimate = 0.0;
    double bell_standard_error = 0.0;
    std::size_t missing_terms = 0;
    double theorem1_bound = 0.0;
    double error_rate = 0.0;
    /// Any uniformity p-value below kInsecurePValue.
    bool insecure = false;
};

/// Throws Error with fewer than kMinSiftedRounds sifted rounds.
SecurityReport security_report(const ProtocolTranscript& t);

nlohmann::json to_json(const ProtocolTranscript& t);
nlohmann::json to_json(const SecurityReport& r);

}  // namespace svlab
