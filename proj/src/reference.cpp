#include "svlab/reference.hpp"

#include <algorithm>
#include <limits>

#include "svlab/summation.hpp"

namespace svlab::reference {

BehaviorTable quantum_behavior(const QuantumModel& qm, QuantumSupport support) {
    const Scenario& sc = qm.scenario();
    std::vector<std::uint64_t> settings;
    if (support == QuantumSupport::full_grid) {
        for (std::uint64_t s = 0; s < sc.setting_count(); ++s) settings.push_back(s);
    } else {
        settings = build_functional(sc).bases();
    }
    std::vector<double> probs;
    probs.reserve(settings.size() * sc.outcome_count());
    for (auto s : settings) {
        const auto st = sc.setting_tuple(s);
        for (std::uint64_t r = 0; r < sc.outcome_count(); ++r) {
            probs.push_back(joint_probability_direct(qm, st, sc.outcome_tuple(r)));
        }
    }
    if (support == QuantumSupport::full_grid) return BehaviorTable::full_grid(sc, std::move(probs));
    return BehaviorTable::sparse(sc, std::move(settings), std::move(probs));
}

double evaluate(const BellFunctional& f, const BehaviorTable& b) {
    const Scenario& sc = f.scenario();
    const int d = sc.outcomes();
    NeumaierSum total;
    for (const auto& t : f.terms()) {
        const auto row = b.row(t.settings);
        for (std::uint64_t r = 0; r < row.size(); ++r) {
            total.add(t.weight(sc.outcome_tuple(r), d) * row[r]);
        }
    }
    return total.value() / static_cast<double>(f.regularization_denominator());
}

namespace {

long long score_groups(const BellFunctional& f, const std::vector<std::vector<int>>& groups,
                       const std::vector<std::vector<int>>& answers) {
    const Scenario& sc = f.scenario();
    const int m = sc.settings();
    const int d = sc.outcomes();
    std::vector<int> r(sc.parties());
    long long total = 0;
    for (const auto& t : f.terms()) {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::size_t joint = 0;
            for (int p : groups[g]) joint = joint * static_cast<std::size_t>(m) + static_cast<std::size_t>(t.settings[p] - 1);
            int v = answers[g][joint];
            for (std::size_t i = groups[g].size(); i-- > 0;) {
                r[groups[g][i]] = v % d;
                v /= d;
            }
        }
        total += t.weight(r, d);
    }
    return total;
}

EnumerationMinimum enumerate(const BellFunctional& f, const std::vector<std::vector<int>>& groups) {
    const Scenario& sc = f.scenario();
    std::vector<std::vector<int>> answers;
    std::vector<int> radix;
    for (const auto& g : groups) {
        int settings = 1;
        int outcomes = 1;
        for (std::size_t i = 0; i < g.size(); ++i) {
            settings *= sc.settings();
            outcomes *= sc.outcomes();
        }
        answers.emplace_back(settings, 0);
        radix.push_back(outcomes);
    }
    EnumerationMinimum best;
    best.weight_sum = std::numeric_limits<long long>::max();
    for (std::uint64_t index = 0;; ++index) {
        const long long s = score_groups(f, groups, answers);
        ++best.evaluations;
        if (s < best.weight_sum) {
            best.weight_sum = s;
            best.witness_index = index;
        }
        // Odometer, last digit of the last group fastest.
        std::size_t g = groups.size();
        bool carry = true;
        while (carry && g-- > 0) {
            for (std::size_t j = answers[g].size(); j-- > 0;) {
                if (++answers[g][j] < radix[g]) {
                    carry = false;
                    break;
                }
                answers[g][j] = 0;
            }
        }
        if (carry) break;
    }
    return best;
}

}  // namespace

EnumerationMinimum min_local(const BellFunctional& f) {
    std::vector<std::vector<int>> groups;
    for (int k = 0; k < f.scenario().parties(); ++k) groups.push_back({k});
    return enumerate(f, groups);
}

EnumerationMinimum min_bilocal(const BellFunctional& f, const std::vector<int>& group) {
    std::vector<int> rest;
    for (int k = 0; k < f.scenario().parties(); ++k) {
        if (std::find(group.begin(), group.end(), k) == group.end()) rest.push_back(k);
    }
    return enumerate(f, {group, rest});
}

ProtocolTranscript run_protocol(const ProtocolConfig& cfg, const BehaviorTable& source) {
    cfg.validate();
    const auto f = build_functional(cfg.scenario);
    std::vector<RoundResult> rounds;
    rounds.reserve(cfg.rounds);
    for (std::uint64_t i = 0; i < cfg.rounds; ++i) rounds.push_back(simulate_round(f, source, cfg.seed, i));
    return summarize_rounds(cfg, f, source, rounds);
}

}  // namespace svlab::reference
