#include "svlab/functional.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "svlab/summation.hpp"

namespace svlab {

TermVariable TermVariable::make(int party, int raw_setting, int sign, int n_settings) {
    if (raw_setting < 1) throw Error("raw setting must be >= 1, got " + std::to_string(raw_setting));
    TermVariable v;
    v.party = party;
    v.raw_setting = raw_setting;
    v.sign = sign;
    v.effective_setting = (raw_setting - 1) % n_settings + 1;
    v.offset = (raw_setting - 1) / n_settings;
    return v;
}

const char* to_string(TermKind k) { return k == TermKind::J ? "J" : "H"; }

int ChainedTerm::weight(std::span<const int> r, int d) const {
    long long acc = 0;
    for (const auto& v : vars) acc += v.sign * (r[v.party] + v.offset);
    return mod(acc, d);
}

int ChainedTerm::forced_outcome(int party, std::span<const int> r, int d) const {
    long long rest = 0;
    const TermVariable* own = nullptr;
    for (const auto& v : vars) {
        if (v.party == party) {
            own = &v;
            continue;
        }
        rest += v.sign * (r[v.party] + v.offset);
    }
    if (own == nullptr) throw Error("party not in term");
    // sign*(x + off) + rest = 0  =>  x = -sign*rest - off   (sign is its own inverse)
    return mod(-static_cast<long long>(own->sign) * rest - own->offset, d);
}

BellFunctional::BellFunctional(Scenario scenario, std::vector<ChainedTerm> terms)
    : scenario_(scenario), terms_(std::move(terms)) {
    reg_den_ = checked_pow(static_cast<std::uint64_t>(scenario_.settings()), scenario_.parties() - 2);
    by_setting_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) by_setting_.emplace_back(terms_[i].setting_index, i);
    std::sort(by_setting_.begin(), by_setting_.end());
    for (std::size_t i = 1; i < by_setting_.size(); ++i) {
        if (by_setting_[i].first == by_setting_[i - 1].first) {
            throw Error("two chained terms share setting tuple " +
                        format_tuple(scenario_.setting_tuple(by_setting_[i].first)));
        }
    }
}

const ChainedTerm* BellFunctional::term_for(std::uint64_t setting_index) const {
    auto it = std::lower_bound(by_setting_.begin(), by_setting_.end(),
                               std::pair<std::uint64_t, std::size_t>{setting_index, 0});
    if (it == by_setting_.end() || it->first != setting_index) return nullptr;
    return &terms_[it->second];
}

bool BellFunctional::is_basis(std::span<const int> s) const {
    return term_for(scenario_.setting_index(s)) != nullptr;
}

std::vector<std::uint64_t> BellFunctional::bases() const {
    std::vector<std::uint64_t> out;
    out.reserve(by_setting_.size());
    for (const auto& [s, i] : by_setting_) out.push_back(s);
    return out;
}

namespace {

ChainedTerm make_term(const Scenario& sc, TermKind kind, const std::vector<int>& sigma) {
    const int n = sc.parties();
    const int m = sc.settings();
    ChainedTerm t;
    t.kind = kind;
    t.sigma = sigma;
    const int flip = kind == TermKind::J ? 1 : -1;
    for (int k = 0; k < n; ++k) {
        int raw;
        if (k == 0) {
            raw = sigma[0] + (kind == TermKind::H ? 1 : 0);
        } else if (k == n - 1) {
            raw = sigma[n - 2];
        } else {
            raw = sigma[k - 1] + sigma[k] - 1;
        }
        // party k (0-based) carries (-1)^k in J terms
        const int sign = (k % 2 == 0 ? 1 : -1) * flip;
        t.vars.push_back(TermVariable::make(k, raw, sign, m));
        t.settings.push_back(t.vars.back().effective_setting);
    }
    t.setting_index = sc.setting_index(t.settings);
    return t;
}

std::vector<ChainedTerm> generic_terms(const Scenario& sc) {
    const int n = sc.parties();
    const int m = sc.settings();
    std::vector<ChainedTerm> terms;
    std::vector<int> sigma(n - 1, 1);
    const std::uint64_t count = checked_pow(static_cast<std::uint64_t>(m), n - 1);
    terms.reserve(2 * count);
    for (std::uint64_t c = 0; c < count; ++c) {
        std::uint64_t rem = c;
        for (int k = n - 2; k >= 0; --k) {
            sigma[k] = static_cast<int>(rem % m) + 1;
            rem /= m;
        }
        terms.push_back(make_term(sc, TermKind::J, sigma));
        terms.push_back(make_term(sc, TermKind::H, sigma));
    }
    return terms;
}

struct Literal {
    int party;
    int raw;
    int sign;
};

bool same_term(const ChainedTerm& t, const std::vector<Literal>& lits) {
    if (t.vars.size() != lits.size()) return false;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        const auto& v = t.vars[i];
        if (v.party != lits[i].party || v.raw_setting != lits[i].raw || v.sign != lits[i].sign) return false;
    }
    return true;
}

// Transcriptions of the two- and three-party inequalities:
//   sum_a <[A_a - B_a]> + <[B_a - A_{a+1}]>
//   sum_{a,b} <[A_a - B_{a+b-1} + C_b]> + <[B_{a+b-1} - A_{a+1} - C_b]>
void cross_check_sign_convention() {
    const int m = 3;
    {
        Scenario sc(2, m, 3);
        auto terms = generic_terms(sc);
        std::size_t i = 0;
        for (int a = 1; a <= m; ++a) {
            if (!same_term(terms[i++], {{0, a, 1}, {1, a, -1}}) ||
                !same_term(terms[i++], {{0, a + 1, -1}, {1, a, 1}})) {
                throw std::logic_error("two-party chained term layout mismatch");
            }
        }
    }
    {
        Scenario sc(3, m, 3);
        auto terms = generic_terms(sc);
        std::size_t i = 0;
        for (int a = 1; a <= m; ++a) {
            for (int b = 1; b <= m; ++b) {
                if (!same_term(terms[i++], {{0, a, 1}, {1, a + b - 1, -1}, {2, b, 1}}) ||
                    !same_term(terms[i++], {{0, a + 1, -1}, {1, a + b - 1, 1}, {2, b, -1}})) {
                    throw std::logic_error("three-party chained term layout mismatch");
                }
            }
        }
    }
}

}  // namespace

BellFunctional build_functional(const Scenario& scenario) {
    static std::once_flag checked;
    std::call_once(checked, cross_check_sign_convention);
    return BellFunctional(scenario, generic_terms(scenario));
}

double term_expectation(const ChainedTerm& term, const BehaviorTable& b) {
    const Scenario& sc = b.scenario();
    const int n = sc.parties();
    const int d = sc.outcomes();
    auto row = b.row(term.setting_index);
    // Odometer over outcome tuples, party 0 most significant, tracking the
    // signed sum incrementally.
    std::vector<int> r(n, 0);
    long long base = 0;
    for (const auto& v : term.vars) base += v.sign * v.offset;
    std::vector<int> signs(n);
    for (const auto& v : term.vars) signs[v.party] = v.sign;
    long long acc = base;
    NeumaierSum sum;
    for (std::size_t oi = 0; oi < row.size(); ++oi) {
        const double p = row[oi];
        if (p != 0.0) sum.add(mod(acc, d) * p);
        for (int k = n - 1; k >= 0; --k) {
            if (++r[k] < d) {
                acc += signs[k];
                break;
            }
            r[k] = 0;
            acc -= static_cast<long long>(signs[k]) * (d - 1);
        }
    }
    return sum.value();
}

double evaluate(const BellFunctional& f, const BehaviorTable& b) {
    const auto& terms = f.terms();
    for (const auto& t : terms) {
        if (!b.supports(t.setting_index)) {
            throw Error("behavior does not support inequality basis " + format_tuple(t.settings));
        }
    }
    const double total = chunked_sum(terms.size(), [&](std::size_t i) { return term_expectation(terms[i], b); });
    return total * f.regularization();
}

double check_permutation_symmetry(const BellFunctional& f, const BehaviorTable& b, std::span<const int> perm) {
    return std::abs(evaluate(f, b) - evaluate(f, permute_parties(b, perm)));
}

bool is_proven_symmetry(int n_parties, std::span<const int> perm) {
    if (static_cast<int>(perm.size()) != n_parties) return false;
    auto is_swap = [&](int a, int b) {
        if (a < 0 || b < 0 || a >= n_parties || b >= n_parties) return false;
        for (int i = 0; i < n_parties; ++i) {
            const int want = i == a ? b : (i == b ? a : i);
            if (perm[i] != want) return false;
        }
        return true;
    };
    bool identity = true;
    for (int i = 0; i < n_parties; ++i) identity = identity && perm[i] == i;
    return identity || is_swap(n_parties - 1, n_parties - 3) || is_swap(0, 2);
}

std::string terms_csv(const BellFunctional& f) {
    const int n = f.scenario().parties();
    std::ostringstream os;
    os << "kind,sigma";
    for (int k = 0; k < n; ++k) {
        const auto p = party_name(k);
        os << ',' << p << "_setting," << p << "_offset," << p << "_sign";
    }
    os << '\n';
    for (const auto& t : f.terms()) {
        os << to_string(t.kind) << ',';
        for (std::size_t i = 0; i < t.sigma.size(); ++i) os << (i ? ";" : "") << t.sigma[i];
        for (const auto& v : t.vars) os << ',' << v.effective_setting << ',' << v.offset << ',' << v.sign;
        os << '\n';
    }
    return os.str();
}

}  // namespace svlab
