#include "svlab/classical.hpp"

#include <algorithm>
#include <limits>

namespace svlab {

namespace {

// Deterministic strategies of a partition of the parties into groups. Each
// group answers every joint setting of its members with a joint outcome; a
// strategy is the concatenation of all groups' answer digits, group 0 first,
// most significant digit first. Counter order is lexicographic order.
class GroupEnumerator {
public:
    GroupEnumerator(const BellFunctional& f, std::vector<std::vector<int>> groups)
        : f_(f), groups_(std::move(groups)) {
        const Scenario& sc = f.scenario();
        const int m = sc.settings();
        const int d = sc.outcomes();
        total_ = 1;
        for (const auto& grp : groups_) {
            const int size = static_cast<int>(grp.size());
            GroupLayout lay;
            lay.digit_base = digits_;
            lay.digits = checked_pow(static_cast<std::uint64_t>(m), size);
            lay.radix = static_cast<int>(checked_pow(static_cast<std::uint64_t>(d), size));
            digits_ += lay.digits;
            for (std::uint64_t i = 0; i < lay.digits; ++i) total_ = mul_sat(total_, static_cast<std::uint64_t>(lay.radix));
            layouts_.push_back(lay);
        }
        radix_.resize(digits_);
        for (const auto& lay : layouts_) {
            std::fill_n(radix_.begin() + static_cast<std::ptrdiff_t>(lay.digit_base), lay.digits, lay.radix);
        }
        for (const auto& t : f.terms()) {
            TermPlan plan;
            long long base = 0;
            for (const auto& v : t.vars) base += v.sign * v.offset;
            plan.base = base;
            for (std::size_t g = 0; g < groups_.size(); ++g) {
                const auto& grp = groups_[g];
                const int size = static_cast<int>(grp.size());
                std::uint64_t joint = 0;
                for (int p : grp) joint = joint * m + static_cast<std::uint64_t>(t.settings[p] - 1);
                plan.digit.push_back(layouts_[g].digit_base + joint);
                // contribution of each joint outcome value of this group
                std::vector<int> contrib(layouts_[g].radix);
                for (int v = 0; v < layouts_[g].radix; ++v) {
                    int rem = v;
                    long long c = 0;
                    for (int i = size - 1; i >= 0; --i) {
                        const int out = rem % d;
                        rem /= d;
                        c += t.vars[grp[i]].sign * out;
                    }
                    contrib[v] = static_cast<int>(c);
                }
                plan.contrib.push_back(std::move(contrib));
            }
            plans_.push_back(std::move(plan));
        }
    }

    std::uint64_t total() const { return total_; }

    struct Best {
        long long sum = std::numeric_limits<long long>::max();
        std::uint64_t index = std::numeric_limits<std::uint64_t>::max();
    };

    Best minimize() const {
        const std::uint64_t total = total_;
        const std::uint64_t chunks = std::min<std::uint64_t>(total, 4096);
        std::vector<Best> partial(chunks);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
            const std::uint64_t lo = total / chunks * static_cast<std::uint64_t>(c) +
                                     std::min<std::uint64_t>(static_cast<std::uint64_t>(c), total % chunks);
            const std::uint64_t len = total / chunks + (static_cast<std::uint64_t>(c) < total % chunks ? 1 : 0);
            std::vector<int> digits = decode(lo);
            Best best;
            for (std::uint64_t i = 0; i < len; ++i) {
                const long long s = score(digits);
                if (s < best.sum) {
                    best.sum = s;
                    best.index = lo + i;
                }
                increment(digits);
            }
            partial[static_cast<std::size_t>(c)] = best;
        }
        Best best;
        for (const auto& b : partial) {
            if (b.sum < best.sum || (b.sum == best.sum && b.index < best.index)) best = b;
        }
        return best;
    }

    std::vector<int> decode(std::uint64_t index) const {
        std::vector<int> digits(digits_);
        for (std::size_t i = digits_; i-- > 0;) {
            digits[i] = static_cast<int>(index % static_cast<std::uint64_t>(radix_[i]));
            index /= static_cast<std::uint64_t>(radix_[i]);
        }
        return digits;
    }

    /// Per group: joint outcome tuple for each joint setting.
    std::vector<std::vector<OutcomeTuple>> answers(std::uint64_t index) const {
        const int d = f_.scenario().outcomes();
        auto digits = decode(index);
        std::vector<std::vector<OutcomeTuple>> out;
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            const auto& lay = layouts_[g];
            std::vector<OutcomeTuple> answers;
            for (std::uint64_t j = 0; j < lay.digits; ++j) {
                int v = digits[lay.digit_base + j];
                OutcomeTuple r(groups_[g].size());
                for (std::size_t i = r.size(); i-- > 0;) {
                    r[i] = v % d;
                    v /= d;
                }
                answers.push_back(std::move(r));
            }
            out.push_back(std::move(answers));
        }
        return out;
    }

private:
    struct GroupLayout {
        std::uint64_t digit_base = 0;
        std::uint64_t digits = 0;
        int radix = 0;
    };
    struct TermPlan {
        long long base = 0;
        std::vector<std::uint64_t> digit;
        std::vector<std::vector<int>> contrib;
    };

    static std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
        if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
        return a * b;
    }

    long long score(const std::vector<int>& digits) const {
        const int d = f_.scenario().outcomes();
        long long total = 0;
        for (const auto& p : plans_) {
            long long acc = p.base;
            for (std::size_t g = 0; g < p.digit.size(); ++g) acc += p.contrib[g][digits[p.digit[g]]];
            total += mod(acc, d);
        }
        return total;
    }

    void increment(std::vector<int>& digits) const {
        for (std::size_t i = digits.size(); i-- > 0;) {
            if (++digits[i] < radix_[i]) return;
            digits[i] = 0;
        }
    }

    const BellFunctional& f_;
    std::vector<std::vector<int>> groups_;
    std::vector<GroupLayout> layouts_;
    std::vector<int> radix_;
    std::size_t digits_ = 0;
    std::uint64_t total_ = 1;
    std::vector<TermPlan> plans_;
};

std::vector<int> complement_of(const std::vector<int>& group, int n) {
    std::vector<int> out;
    for (int k = 0; k < n; ++k) {
        if (std::find(group.begin(), group.end(), k) == group.end()) out.push_back(k);
    }
    return out;
}

std::string too_big(std::uint64_t count, std::uint64_t cap, const Scenario& sc) {
    return "enumeration of " + (count == std::numeric_limits<std::uint64_t>::max() ? std::string(">2^64") : std::to_string(count)) +
           " strategies for " + sc.describe() + " exceeds cap " + std::to_string(cap) +
           "; try fewer parties, settings or outcomes";
}

}  // namespace

std::vector<std::vector<int>> bipartitions(int n_parties) {
    std::vector<std::vector<int>> out;
    const unsigned full = (1u << n_parties) - 1;
    for (unsigned mask = 1; mask < full; ++mask) {
        if (!(mask & 1u)) continue;
        std::vector<int> g;
        for (int k = 0; k < n_parties; ++k) {
            if (mask & (1u << k)) g.push_back(k);
        }
        out.push_back(std::move(g));
    }
    return out;
}

namespace {
std::vector<std::vector<int>> singleton_groups(int n) {
    std::vector<std::vector<int>> g;
    for (int k = 0; k < n; ++k) g.push_back({k});
    return g;
}
}  // namespace

std::uint64_t local_strategy_count(const BellFunctional& f) {
    return GroupEnumerator(f, singleton_groups(f.scenario().parties())).total();
}

std::uint64_t bilocal_strategy_count(const BellFunctional& f, const std::vector<int>& group) {
    return GroupEnumerator(f, {group, complement_of(group, f.scenario().parties())}).total();
}

LocalMinimum min_local(const BellFunctional& f, std::uint64_t cap) {
    const Scenario& sc = f.scenario();
    GroupEnumerator e(f, singleton_groups(sc.parties()));
    if (e.total() > cap) throw CapExceeded(too_big(e.total(), cap, sc));
    const auto best = e.minimize();
    LocalMinimum out;
    out.weight_sum = best.sum;
    out.minimum = static_cast<double>(best.sum) / static_cast<double>(f.regularization_denominator());
    out.evaluations = e.total();
    out.witness_index = best.index;
    for (auto& a : e.answers(best.index)) {
        std::vector<int> per_setting;
        for (auto& r : a) per_setting.push_back(r[0]);
        out.witness.push_back(std::move(per_setting));
    }
    return out;
}

BilocalMinimum min_bilocal(const BellFunctional& f, std::uint64_t cap, const std::optional<std::vector<int>>& only_group) {
    const Scenario& sc = f.scenario();
    const int n = sc.parties();
    std::vector<std::vector<int>> groups;
    if (only_group) {
        auto g = *only_group;
        std::sort(g.begin(), g.end());
        if (g.empty() || static_cast<int>(g.size()) >= n || g.front() < 0 || g.back() >= n ||
            std::adjacent_find(g.begin(), g.end()) != g.end()) {
            throw Error("bipartition group must be a nonempty proper subset of the parties");
        }
        if (g.front() != 0) g = complement_of(g, n);
        groups.push_back(g);
    } else {
        groups = bipartitions(n);
    }
    std::vector<GroupEnumerator> enums;
    std::uint64_t total = 0;
    for (const auto& g : groups) {
        enums.emplace_back(f, std::vector<std::vector<int>>{g, complement_of(g, n)});
        const auto t = enums.back().total();
        total = t > std::numeric_limits<std::uint64_t>::max() - total ? std::numeric_limits<std::uint64_t>::max()
                                                                        : total + t;
    }
    if (total > cap) throw CapExceeded(too_big(total, cap, sc));
    BilocalMinimum out;
    out.weight_sum = std::numeric_limits<long long>::max();
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto best = enums[i].minimize();
        BipartitionMinimum bm;
        bm.group = groups[i];
        bm.complement = complement_of(groups[i], n);
        bm.weight_sum = best.sum;
        bm.minimum = static_cast<double>(best.sum) / static_cast<double>(f.regularization_denominator());
        bm.evaluations = enums[i].total();
        bm.witness_index = best.index;
        bm.witness.group = bm.group;
        bm.witness.complement = bm.complement;
        bm.witness.group_answers = enums[i].answers(best.index);
        out.evaluations += bm.evaluations;
        if (best.sum < out.weight_sum) {
            out.weight_sum = best.sum;
            out.witness_bipartition = i;
        }
        out.per_bipartition.push_back(std::move(bm));
    }
    out.minimum = static_cast<double>(out.weight_sum) / static_cast<double>(f.regularization_denominator());
    return out;
}

GapReport gap_report(const BellFunctional& f, const LocalMinimum& local, const BilocalMinimum& bilocal,
                     double quantum_value, std::optional<double> nonsignaling_minimum) {
    GapReport g;
    g.classical_minimum = local.minimum;
    g.bilocal_minimum = bilocal.minimum;
    g.quantum_value = quantum_value;
    g.nonsignaling_minimum = nonsignaling_minimum;
    g.quantum_strictly_inside = quantum_value > 0.0 && quantum_value < f.scenario().outcomes() - 1;
    return g;
}

nlohmann::json to_json(const LocalDeterministicStrategy& s) {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t k = 0; k < s.size(); ++k) j.push_back({{"party", party_name(static_cast<int>(k))}, {"outcome_per_setting", s[k]}});
    return j;
}

nlohmann::json to_json(const BilocalDeterministicStrategy& s) {
    auto names = [](const std::vector<int>& g) {
        std::string out;
        for (int k : g) out += party_name(k);
        return out;
    };
    nlohmann::json groups = nlohmann::json::array();
    const std::vector<int>* members[2] = {&s.group, &s.complement};
    for (std::size_t g = 0; g < s.group_answers.size(); ++g) {
        groups.push_back({{"parties", names(*members[g])}, {"answers", s.group_answers[g]}});
    }
    return {{"bipartition", names(s.group) + ":" + names(s.complement)}, {"groups", groups}};
}

nlohmann::json to_json(const GapReport& g) {
    nlohmann::json j = {{"classical_minimum", g.classical_minimum},
                        {"bilocal_minimum", g.bilocal_minimum},
                        {"quantum_value", g.quantum_value},
                        {"quantum_strictly_inside", g.quantum_strictly_inside}};
    if (g.nonsignaling_minimum) j["nonsignaling_minimum"] = *g.nonsignaling_minimum;
    return j;
}

}  // namespace svlab
