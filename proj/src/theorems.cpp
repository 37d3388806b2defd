#include "svlab/theorems.hpp"

#include <cmath>

#include "svlab/nonsignaling.hpp"
#include "svlab/summation.hpp"

namespace svlab {

namespace {

void require_bases(const BehaviorTable& b, const BellFunctional& f) {
    for (const auto& t : f.terms()) {
        if (!b.supports(t.setting_index)) {
            throw Error("behavior does not support inequality basis " + format_tuple(t.settings));
        }
    }
}

}  // namespace

std::vector<MarginalReport> check_theorem1(const BehaviorTable& b, const BellFunctional& f, double tol) {
    require_bases(b, f);
    const Scenario& sc = b.scenario();
    const int n = sc.parties();
    const double eps = evaluate(f, b);
    const double bound = theorem1_bound(sc, eps);
    std::vector<MarginalReport> out;
    for (int skip = 0; skip < n; ++skip) {
        MarginalReport rep;
        for (int k = 0; k < n; ++k) {
            if (k != skip) rep.subset.push_back(k);
        }
        rep.epsilon = eps;
        rep.bound = bound;
        for (auto s : f.bases()) {
            BasisMarginal bm;
            bm.setting = sc.setting_tuple(s);
            for (double p : marginalize(b, rep.subset, bm.setting)) bm.max_marginal = std::max(bm.max_marginal, p);
            bm.pass = bm.max_marginal <= bound + tol;
            rep.max_marginal = std::max(rep.max_marginal, bm.max_marginal);
            rep.pass = rep.pass && bm.pass;
            rep.bases.push_back(std::move(bm));
        }
        out.push_back(std::move(rep));
    }
    return out;
}

Eq13Result check_eq13(std::span<const double> dist, double tol) {
    if (dist.size() < 2) throw Error("distribution needs at least two outcomes");
    NeumaierSum total;
    for (double p : dist) {
        if (!(p >= 0.0)) throw Error("distribution has a negative or NaN entry");
        total.add(p);
    }
    if (std::abs(total.value() - 1.0) > 1e-9) {
        throw Error("distribution is not normalized (sum " + std::to_string(total.value()) + ")");
    }
    NeumaierSum mean;
    for (std::size_t i = 1; i < dist.size(); ++i) mean.add(static_cast<double>(i) * dist[i]);
    Eq13Result r;
    r.expectation = mean.value();
    r.rhs = 1.0 - dist[0];
    r.pass = r.expectation >= r.rhs - tol;
    return r;
}

AppendixCResult check_appendixC(const BehaviorTable& b, const BellFunctional& f, std::span<const int> basis,
                                std::span<const int> anchor, double tol) {
    const Scenario& sc = b.scenario();
    const int n = sc.parties();
    const int d = sc.outcomes();
    const ChainedTerm* term = f.term_for(sc.setting_index(basis));
    if (term == nullptr) throw Error("setting " + format_tuple(basis) + " is not an inequality basis");
    if (static_cast<int>(anchor.size()) != n - 1) throw Error("anchor needs N-1 outcomes");
    for (int a : anchor) {
        if (a < 0 || a >= d) throw Error("anchor outcome out of range");
    }
    const auto row = b.row(basis);

    OutcomeTuple probe(anchor.begin(), anchor.end());
    probe.push_back(0);
    AppendixCResult res;
    res.forced_value = term->forced_outcome(n - 1, probe, d);

    NeumaierSum lhs, m1, m2;
    for (std::uint64_t i = 0; i < row.size(); ++i) {
        if (row[i] == 0.0) continue;
        const auto r = sc.outcome_tuple(i);
        if (term->weight(r, d) == 0) lhs.add(row[i]);
        bool head = true;
        for (int k = 0; k < n - 1; ++k) head = head && r[k] == anchor[k];
        if (head) m1.add(row[i]);
        bool tail = r[n - 1] == res.forced_value;
        for (int k = 1; k < n - 1; ++k) tail = tail && r[k] == anchor[k];
        if (tail) m2.add(row[i]);
    }
    res.lhs = lhs.value();
    res.first_marginal = m1.value();
    res.second_marginal = m2.value();
    res.rhs = 1.0 - std::abs(res.first_marginal - res.second_marginal);
    res.pass = res.lhs <= res.rhs + tol;
    return res;
}

GridDistanceSum grid_distance_sums(int d) {
    if (d < 2) throw Error("grid distance sums need d >= 2");
    const int hi = d % 2 == 1 ? (d - 1) / 2 : d / 2;
    const int lo = d % 2 == 1 ? -hi : 1 - hi;
    GridDistanceSum g;
    for (int i = lo; i <= hi; ++i) g.sum += std::abs(i);
    const long long dd = static_cast<long long>(d) * d;
    g.expected = d % 2 == 1 ? (dd - 1) / 4 : dd / 4;
    return g;
}

Eq10Report check_eq10(const BehaviorTable& b, const BellFunctional& f) {
    require_bases(b, f);
    const Scenario& sc = b.scenario();
    const int d = sc.outcomes();
    Eq10Report rep;
    for (const auto& t : f.terms()) {
        const auto row = b.row(t.setting_index);
        NeumaierSum mass;
        for (std::uint64_t i = 0; i < row.size(); ++i) {
            if (row[i] != 0.0 && t.weight(sc.outcome_tuple(i), d) != 0) mass.add(row[i]);
        }
        if (rep.worst_basis.empty() || mass.value() > rep.max_violating_mass) {
            rep.max_violating_mass = mass.value();
            rep.worst_basis = t.settings;
        }
    }
    return rep;
}

namespace {

std::vector<double> dirichlet_weights(std::size_t k, CounterRng& rng) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& x : w) {
        x = -std::log1p(-rng.uniform());
        total += x;
    }
    for (auto& x : w) x /= total;
    return w;
}

}  // namespace

BehaviorTable random_nonsignaling_behavior(const Scenario& sc, CounterRng& rng, int n_local) {
    const int n = sc.parties();
    const int m = sc.settings();
    const int d = sc.outcomes();
    const auto weights = dirichlet_weights(static_cast<std::size_t>(n_local) + 1, rng);
    const auto box = ideal_box(sc, true);
    std::vector<double> probs(box.raw().begin(), box.raw().end());
    for (auto& p : probs) p *= weights.back();
    const std::uint64_t oc = sc.outcome_count();
    std::vector<int> r(n);
    for (int j = 0; j < n_local; ++j) {
        std::vector<std::vector<int>> table(n, std::vector<int>(m));
        for (auto& party : table) {
            for (auto& x : party) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
        }
        for (std::uint64_t s = 0; s < sc.setting_count(); ++s) {
            const auto st = sc.setting_tuple(s);
            for (int k = 0; k < n; ++k) r[k] = table[k][st[k] - 1];
            probs[s * oc + sc.outcome_index(r)] += weights[j];
        }
    }
    return BehaviorTable::full_grid(sc, std::move(probs));
}

BehaviorTable random_behavior(const Scenario& sc, CounterRng& rng) {
    const std::uint64_t oc = sc.outcome_count();
    std::vector<double> probs;
    probs.reserve(sc.setting_count() * oc);
    for (std::uint64_t s = 0; s < sc.setting_count(); ++s) {
        const auto w = dirichlet_weights(oc, rng);
        probs.insert(probs.end(), w.begin(), w.end());
    }
    return BehaviorTable::full_grid(sc, std::move(probs));
}

std::vector<double> random_distribution(int d, CounterRng& rng) {
    return dirichlet_weights(static_cast<std::size_t>(d), rng);
}

}  // namespace svlab
