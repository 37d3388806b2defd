#include "svlab/nonsignaling.hpp"

#include <cmath>
#include <exception>

namespace svlab {

GridShape GridShape::of(const Scenario& sc) {
    return GridShape{std::vector<int>(sc.parties(), sc.settings()), sc.outcomes()};
}

std::uint64_t GridShape::setting_count() const {
    std::uint64_t c = 1;
    for (int s : settings) c *= static_cast<std::uint64_t>(s);
    return c;
}

std::uint64_t GridShape::outcome_count() const { return checked_pow(static_cast<std::uint64_t>(outcomes), parties()); }

namespace {

// Mixed-radix encode with party 0 most significant.
std::uint64_t encode(std::span<const int> digits, std::span<const int> radix) {
    std::uint64_t idx = 0;
    for (std::size_t k = 0; k < digits.size(); ++k) idx = idx * static_cast<std::uint64_t>(radix[k]) + static_cast<std::uint64_t>(digits[k]);
    return idx;
}

void decode(std::uint64_t idx, std::span<const int> radix, std::span<int> out) {
    for (std::size_t k = radix.size(); k-- > 0;) {
        out[k] = static_cast<int>(idx % static_cast<std::uint64_t>(radix[k]));
        idx /= static_cast<std::uint64_t>(radix[k]);
    }
}

}  // namespace

std::size_t add_nonsignaling_block(LpProblem& lp, const GridShape& shape) {
    const int n = shape.parties();
    const int d = shape.outcomes;
    const std::uint64_t sc = shape.setting_count();
    const std::uint64_t oc = shape.outcome_count();
    const std::size_t base = lp.num_vars;
    for (std::uint64_t i = 0; i < sc * oc; ++i) lp.add_var();
    auto col = [&](std::uint64_t s, std::uint64_t r) { return base + static_cast<std::size_t>(shape.column(s, r)); };

    for (std::uint64_t s = 0; s < sc; ++s) {
        LpProblem::Row row;
        row.kind = LpProblem::RowKind::eq;
        row.rhs = 1.0;
        row.label = "norm s=" + std::to_string(s);
        for (std::uint64_t r = 0; r < oc; ++r) row.coefs.emplace_back(col(s, r), 1.0);
        lp.add_row(std::move(row));
    }

    const std::vector<int> out_radix(n, d);
    std::vector<int> sdig(n), rdig(n);
    for (int k = 0; k < n; ++k) {
        const int mk = shape.settings[k];
        if (mk < 2) continue;
        // other parties' radices
        std::vector<int> other_s, other_o;
        for (int j = 0; j < n; ++j) {
            if (j == k) continue;
            other_s.push_back(shape.settings[j]);
            other_o.push_back(d);
        }
        std::uint64_t n_os = 1, n_oo = 1;
        for (int v : other_s) n_os *= static_cast<std::uint64_t>(v);
        for (int v : other_o) n_oo *= static_cast<std::uint64_t>(v);
        std::vector<int> od(n - 1), oo(n - 1);
        for (std::uint64_t os = 0; os < n_os; ++os) {
            decode(os, other_s, od);
            for (std::uint64_t ro = 0; ro < n_oo; ++ro) {
                decode(ro, other_o, oo);
                for (int j = 0, t = 0; j < n; ++j) {
                    if (j == k) continue;
                    sdig[j] = od[t];
                    rdig[j] = oo[t];
                    ++t;
                }
                for (int x = 1; x < mk; ++x) {
                    LpProblem::Row row;
                    row.kind = LpProblem::RowKind::eq;
                    row.rhs = 0.0;
                    row.label = "ns party=" + std::to_string(k) + " x=" + std::to_string(x + 1);
                    for (int a = 0; a < d; ++a) {
                        rdig[k] = a;
                        const auto r = encode(rdig, out_radix);
                        sdig[k] = x;
                        row.coefs.emplace_back(col(encode(sdig, shape.settings), r), 1.0);
                        sdig[k] = 0;
                        row.coefs.emplace_back(col(encode(sdig, shape.settings), r), -1.0);
                    }
                    lp.add_row(std::move(row));
                }
            }
        }
    }
    return base;
}

std::vector<std::pair<std::size_t, double>> bell_coefficients(const BellFunctional& f, std::size_t base_column) {
    const Scenario& sc = f.scenario();
    const int d = sc.outcomes();
    const std::uint64_t oc = sc.outcome_count();
    std::vector<std::pair<std::size_t, double>> out;
    for (const auto& t : f.terms()) {
        for (std::uint64_t r = 0; r < oc; ++r) {
            const int w = t.weight(sc.outcome_tuple(r), d);
            if (w != 0) out.emplace_back(base_column + static_cast<std::size_t>(t.setting_index * oc + r), w);
        }
    }
    return out;
}

LpProblem nonsignaling_polytope(const Scenario& sc) {
    LpProblem lp;
    add_nonsignaling_block(lp, GridShape::of(sc));
    lp.behavior_scenario = sc;
    return lp;
}

void attach_behavior(LpSolution& sol, const Scenario& sc, const Tolerances& tol) {
    if (sol.status != LpSolution::Status::optimal) return;
    const std::size_t cells = static_cast<std::size_t>(sc.setting_count() * sc.outcome_count());
    if (sol.x.size() < cells) throw Error("LP solution has fewer columns than the behavior block");
    std::vector<double> probs(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(cells));
    auto b = BehaviorTable::full_grid(sc, std::move(probs), tol, BehaviorTable::Validation::checked);
    const auto ns = check_nonsignaling(b, tol);
    if (!ns.pass) {
        throw Error("LP optimum violates nonsignaling by " + std::to_string(ns.max_violation));
    }
    sol.behavior = std::move(b);
}

namespace {

double max_marginal_deviation(const BehaviorTable& b, const BellFunctional& f) {
    const Scenario& sc = b.scenario();
    const int n = sc.parties();
    const double target = 1.0 / std::pow(static_cast<double>(sc.outcomes()), n - 1);
    double worst = 0.0;
    for (const auto& t : f.terms()) {
        for (int skip = 0; skip < n; ++skip) {
            std::vector<int> keep;
            for (int k = 0; k < n; ++k) {
                if (k != skip) keep.push_back(k);
            }
            for (double p : marginalize(b, keep, t.settings)) worst = std::max(worst, std::abs(p - target));
        }
    }
    return worst;
}

}  // namespace

LpProblem min_bell_problem(const Scenario& sc) {
    const auto f = build_functional(sc);
    LpProblem lp = nonsignaling_polytope(sc);
    lp.sense = LpProblem::Sense::minimize;
    for (const auto& [j, w] : bell_coefficients(f)) lp.objective[j] += w;
    return lp;
}

MinBellResult min_bell_ns(const Scenario& sc, const NsOptions& opt) {
    const auto f = build_functional(sc);
    MinBellResult res;
    res.lp = solve(min_bell_problem(sc), opt.solve);
    if (res.lp.status != LpSolution::Status::optimal) return res;
    res.value = res.lp.objective / static_cast<double>(f.regularization_denominator());
    attach_behavior(res.lp, sc, opt.check);
    res.marginal_deviation = max_marginal_deviation(*res.lp.behavior, f);
    return res;
}

BehaviorTable ideal_box(const Scenario& sc, bool fill_uniform) {
    const auto f = build_functional(sc);
    const int n = sc.parties();
    const int d = sc.outcomes();
    const std::uint64_t oc = sc.outcome_count();
    const double p = 1.0 / std::pow(static_cast<double>(d), n - 1);
    if (fill_uniform) {
        std::vector<double> probs(sc.setting_count() * oc, 1.0 / static_cast<double>(oc));
        for (const auto& t : f.terms()) {
            for (std::uint64_t r = 0; r < oc; ++r) {
                probs[t.setting_index * oc + r] = t.weight(sc.outcome_tuple(r), d) == 0 ? p : 0.0;
            }
        }
        return BehaviorTable::full_grid(sc, std::move(probs));
    }
    std::vector<std::uint64_t> settings;
    std::vector<double> probs;
    for (const auto& t : f.terms()) {
        settings.push_back(t.setting_index);
        for (std::uint64_t r = 0; r < oc; ++r) probs.push_back(t.weight(sc.outcome_tuple(r), d) == 0 ? p : 0.0);
    }
    return BehaviorTable::sparse(sc, std::move(settings), std::move(probs));
}

std::map<std::uint64_t, std::vector<Rational>> ideal_box_exact(const Scenario& sc) {
    const auto f = build_functional(sc);
    const int d = sc.outcomes();
    const std::uint64_t oc = sc.outcome_count();
    const Rational p(1, static_cast<long long>(oc / static_cast<std::uint64_t>(d)));
    std::map<std::uint64_t, std::vector<Rational>> rows;
    for (const auto& t : f.terms()) {
        std::vector<Rational> row(oc, Rational(0));
        for (std::uint64_t r = 0; r < oc; ++r) {
            if (t.weight(sc.outcome_tuple(r), d) == 0) row[r] = p;
        }
        rows.emplace(t.setting_index, std::move(row));
    }
    return rows;
}

Rational evaluate_exact(const BellFunctional& f, const std::map<std::uint64_t, std::vector<Rational>>& rows) {
    const Scenario& sc = f.scenario();
    const int d = sc.outcomes();
    Rational total = 0;
    for (const auto& t : f.terms()) {
        auto it = rows.find(t.setting_index);
        if (it == rows.end()) throw Error("exact behavior does not support basis " + format_tuple(t.settings));
        for (std::uint64_t r = 0; r < it->second.size(); ++r) {
            if (it->second[r] == 0) continue;
            total += it->second[r] * t.weight(sc.outcome_tuple(r), d);
        }
    }
    return total / Rational(static_cast<long long>(f.regularization_denominator()));
}

double theorem1_bound(const Scenario& sc, double epsilon) {
    const int n = sc.parties();
    const double d = sc.outcomes();
    return 1.0 / std::pow(d, n - 1) + d * (n - 1) * epsilon / 4.0;
}

LpProblem theorem1_problem(const Scenario& sc, int excluded_party, std::span<const int> setting,
                           std::span<const int> target, double epsilon) {
    const int n = sc.parties();
    const auto f = build_functional(sc);
    if (excluded_party < 0 || excluded_party >= n) throw Error("excluded party out of range");
    if (static_cast<int>(target.size()) != n - 1) throw Error("target outcome needs N-1 entries");
    if (!f.is_basis(setting)) throw Error("setting " + format_tuple(setting) + " is not an inequality basis");
    for (int v : target) {
        if (v < 0 || v >= sc.outcomes()) throw Error("target outcome out of range");
    }
    const std::uint64_t oc = sc.outcome_count();
    const std::uint64_t s_idx = sc.setting_index(setting);

    LpProblem lp = nonsignaling_polytope(sc);
    lp.sense = LpProblem::Sense::maximize;
    for (std::uint64_t r = 0; r < oc; ++r) {
        const auto rt = sc.outcome_tuple(r);
        bool match = true;
        for (int k = 0, t = 0; k < n; ++k) {
            if (k == excluded_party) continue;
            match = match && rt[k] == target[t++];
        }
        if (match) lp.objective[static_cast<std::size_t>(s_idx * oc + r)] = 1.0;
    }
    LpProblem::Row bell;
    bell.kind = LpProblem::RowKind::le;
    bell.rhs = epsilon * static_cast<double>(f.regularization_denominator());
    bell.label = "bell <= eps";
    bell.coefs = bell_coefficients(f);
    lp.add_row(std::move(bell));
    return lp;
}

std::vector<Theorem1Point> theorem1_probe(const Scenario& sc, int excluded_party, std::span<const int> setting,
                                          std::span<const int> target, std::span<const double> eps_grid,
                                          const NsOptions& opt) {
    // Validates the arguments once before going parallel.
    (void)theorem1_problem(sc, excluded_party, setting, target, 0.0);
    std::vector<Theorem1Point> out(eps_grid.size());
    std::vector<std::exception_ptr> errors(eps_grid.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(eps_grid.size()); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        try {
            const auto sol = solve(theorem1_problem(sc, excluded_party, setting, target, eps_grid[ui]), opt.solve);
            Theorem1Point pt;
            pt.epsilon = eps_grid[ui];
            pt.status = sol.status;
            pt.bound = theorem1_bound(sc, eps_grid[ui]);
            if (sol.status == LpSolution::Status::optimal) {
                pt.lp_value = sol.objective;
                pt.within_bound = pt.lp_value <= pt.bound + 1e-7;
            }
            out[ui] = pt;
        } catch (...) {
            errors[ui] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

LpProblem monogamy_problem(const BehaviorTable& fixed, int target_party, std::span<const int> setting) {
    const Scenario& sc = fixed.scenario();
    const int n = sc.parties();
    const int d = sc.outcomes();
    if (target_party < 0 || target_party >= n) throw Error("target party out of range");
    sc.validate(setting);
    GridShape shape = GridShape::of(sc);
    shape.settings.push_back(1);  // eavesdropper
    LpProblem lp;
    add_nonsignaling_block(lp, shape);
    const std::uint64_t oc = sc.outcome_count();
    const std::uint64_t ext_oc = shape.outcome_count();
    for (auto s : fixed.support()) {
        auto row = fixed.row(s);
        for (std::uint64_t r = 0; r < oc; ++r) {
            LpProblem::Row c;
            c.kind = LpProblem::RowKind::eq;
            c.rhs = row[r];
            c.label = "marginal";
            for (int e = 0; e < d; ++e) c.coefs.emplace_back(static_cast<std::size_t>(s * ext_oc + r * d + e), 1.0);
            lp.add_row(std::move(c));
        }
    }
    lp.sense = LpProblem::Sense::maximize;
    const std::uint64_t s_idx = sc.setting_index(setting);
    for (std::uint64_t r = 0; r < oc; ++r) {
        const int guess = sc.outcome_tuple(r)[target_party];
        lp.objective[static_cast<std::size_t>(s_idx * ext_oc + r * d + guess)] = 1.0;
    }
    return lp;
}

MonogamyResult monogamy_probe(const BehaviorTable& fixed, int target_party, std::span<const int> setting,
                              const NsOptions& opt) {
    MonogamyResult res;
    res.lp = solve(monogamy_problem(fixed, target_party, setting), opt.solve);
    if (res.lp.status == LpSolution::Status::optimal) res.guessing_probability = res.lp.objective;
    return res;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(std::vector<std::vector<Rational>>& a, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
        std::size_t p = r;
        while (p < a.size() && a[p][c] == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[r]);
        const Rational inv = Rational(1) / a[r][c];
        for (auto& v : a[r]) v *= inv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == r || a[i][c] == 0) continue;
            const Rational f = a[i][c];
            for (std::size_t j = c; j < a[i].size(); ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

UniquenessResult uniqueness_check(const Scenario& sc, std::span<const int> basis, bool pin_marginals) {
    const auto f = build_functional(sc);
    const ChainedTerm* term = f.term_for(sc.setting_index(basis));
    if (term == nullptr) throw Error("setting " + format_tuple(basis) + " is not an inequality basis");
    const int n = sc.parties();
    const int d = sc.outcomes();
    const std::uint64_t oc = sc.outcome_count();
    const std::size_t cols = static_cast<std::size_t>(oc);
    const Rational share(1, static_cast<long long>(oc / static_cast<std::uint64_t>(d)));

    std::vector<std::vector<Rational>> a;
    for (std::uint64_t r = 0; r < oc; ++r) {
        if (term->weight(sc.outcome_tuple(r), d) == 0) continue;
        std::vector<Rational> row(cols + 1, Rational(0));
        row[r] = 1;
        a.push_back(std::move(row));
    }
    if (pin_marginals) {
        for (int skip = 0; skip < n; ++skip) {
            const std::uint64_t sub = oc / static_cast<std::uint64_t>(d);
            for (std::uint64_t m = 0; m < sub; ++m) {
                std::vector<Rational> row(cols + 1, Rational(0));
                for (std::uint64_t r = 0; r < oc; ++r) {
                    const auto rt = sc.outcome_tuple(r);
                    std::uint64_t idx = 0;
                    for (int k = 0; k < n; ++k) {
                        if (k != skip) idx = idx * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(rt[k]);
                    }
                    if (idx == m) row[r] = 1;
                }
                row[cols] = share;
                a.push_back(std::move(row));
            }
        }
    }
    {
        std::vector<Rational> row(cols + 1, Rational(1));
        a.push_back(std::move(row));
    }

    UniquenessResult res;
    res.unknowns = cols;
    res.equations = a.size();
    const auto pivots = rref(a, cols);
    res.rank = pivots.size();
    for (std::size_t i = res.rank; i < a.size(); ++i) {
        if (a[i][cols] != 0) res.consistent = false;
    }
    res.unique = res.consistent && res.rank == cols;
    if (res.unique) {
        res.solution.assign(cols, Rational(0));
        for (std::size_t i = 0; i < pivots.size(); ++i) res.solution[pivots[i]] = a[i][cols];
        res.equals_ideal_box = true;
        for (std::uint64_t r = 0; r < oc; ++r) {
            const Rational want = term->weight(sc.outcome_tuple(r), d) == 0 ? share : Rational(0);
            if (res.solution[r] != want) res.equals_ideal_box = false;
        }
    }
    return res;
}

}  // namespace svlab
