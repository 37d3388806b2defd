#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svlab/behavior.hpp"
#include "svlab/scenario.hpp"

namespace svlab {

/// One party's variable inside a chained term. A raw setting beyond M wraps
/// onto setting ((raw-1) mod M)+1 with its outcome shifted by floor((raw-1)/M).
struct TermVariable {
    int party = 0;
    int raw_setting = 1;
    int sign = 1;
    int effective_setting = 1;
    int offset = 0;

    static TermVariable make(int party, int raw_setting, int sign, int n_settings);
};

enum class TermKind { J, H };

const char* to_string(TermKind k);

struct ChainedTerm {
    TermKind kind = TermKind::J;
    /// (sigma_1, ..., sigma_{N-1}), 1-based.
    std::vector<int> sigma;
    std::vector<TermVariable> vars;
    SettingTuple settings;
    std::uint64_t setting_index = 0;

    /// (sum_k sign_k (r_k + offset_k)) mod d.
    int weight(std::span<const int> r, int d) const;
    /// Outcome of `party` that makes the weight vanish given the others.
    int forced_outcome(int party, std::span<const int> r, int d) const;
};

/// Regularized chained Svetlichny functional: (1/M^{N-2}) * sum of 2 M^{N-1}
/// chained terms, each the mean of a mod-d linear combination of outcomes.
class BellFunctional {
public:
    BellFunctional(Scenario scenario, std::vector<ChainedTerm> terms);

    const Scenario& scenario() const { return scenario_; }
    const std::vector<ChainedTerm>& terms() const { return terms_; }
    /// M^{N-2}; the functional is (sum of terms) / this.
    std::uint64_t regularization_denominator() const { return reg_den_; }
    double regularization() const { return 1.0 / static_cast<double>(reg_den_); }

    /// Term whose effective setting tuple is `setting_index`, if any.
    const ChainedTerm* term_for(std::uint64_t setting_index) const;
    bool is_basis(std::span<const int> s) const;
    /// Setting indices of all inequality bases, ascending.
    std::vector<std::uint64_t> bases() const;

private:
    Scenario scenario_;
    std::vector<ChainedTerm> terms_;
    std::uint64_t reg_den_;
    std::vector<std::pair<std::uint64_t, std::size_t>> by_setting_;
};

BellFunctional build_functional(const Scenario& scenario);

double term_expectation(const ChainedTerm& term, const BehaviorTable& b);

/// Compensated sum over terms in construction order, chunked so the result is
/// bit-identical for any OpenMP thread count.
double evaluate(const BellFunctional& f, const BehaviorTable& b);

/// Unnormalized integer sum of term weights for a deterministic assignment
/// `outcome(party, effective_setting)`; value = sum / M^{N-2}.
template <class OutcomeFn>
long long deterministic_weight_sum(const BellFunctional& f, OutcomeFn&& outcome) {
    const int d = f.scenario().outcomes();
    long long total = 0;
    for (const auto& t : f.terms()) {
        long long acc = 0;
        for (const auto& v : t.vars) acc += v.sign * (outcome(v.party, v.effective_setting) + v.offset);
        total += mod(acc, d);
    }
    return total;
}

double check_permutation_symmetry(const BellFunctional& f, const BehaviorTable& b, std::span<const int> perm);

/// True for the transpositions the symmetry argument covers: parties N and N-2
/// (0-based N-1 and N-3) and parties 1 and 3 (0-based 0 and 2), plus identity.
bool is_proven_symmetry(int n_parties, std::span<const int> perm);

/// CSV dump: kind, sigma, then setting/offset/sign per party.
std::string terms_csv(const BellFunctional& f);

}  // namespace svlab
