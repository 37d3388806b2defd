#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "svlab/nonsignaling.hpp"
#include "svlab/quantum.hpp"
#include "svlab/theorems.hpp"

using namespace svlab;

TEST_CASE("marginal bound examples") {
    SUBCASE("ideal box sits exactly on the bound") {
        Scenario sc(3, 2, 2);
        const auto reps = check_theorem1(ideal_box(sc), build_functional(sc));
        REQUIRE(reps.size() == 3);
        CHECK(reps[0].subset == std::vector<int>{1, 2});
        CHECK(reps[2].subset == std::vector<int>{0, 1});
        for (const auto& r : reps) {
            CHECK(r.epsilon == 0.0);
            CHECK(r.bound == 0.25);
            CHECK(r.max_marginal == 0.25);
            CHECK(r.bases.size() == 8);
            CHECK(r.pass);
        }
    }
    SUBCASE("quantum behavior") {
        Scenario sc(3, 2, 2);
        const auto reps = check_theorem1(quantum_behavior(QuantumModel(sc), QuantumSupport::full_grid),
                                         build_functional(sc));
        for (const auto& r : reps) {
            CHECK(std::abs(r.epsilon - (2.0 - std::sqrt(2.0))) < 1e-12);
            CHECK(std::abs(r.bound - (0.25 + r.epsilon)) < 1e-15);
            CHECK(r.pass);
        }
    }
    SUBCASE("a signaling table with zero Bell value can break the bound") {
        // Each basis row puts all weight on one tuple satisfying its constraint.
        Scenario sc(2, 2, 2);
        const auto f = build_functional(sc);
        std::vector<double> p(16, 0.0);
        for (const auto& t : f.terms()) {
            for (std::uint64_t i = 0; i < 4; ++i) {
                if (t.weight(sc.outcome_tuple(i), 2) == 0) {
                    p[t.setting_index * 4 + i] = 1.0;
                    break;
                }
            }
        }
        const auto b = BehaviorTable::full_grid(sc, p);
        CHECK(evaluate(f, b) == 0.0);
        CHECK(oracle::max_signaling(b) > 0.5);
        const auto reps = check_theorem1(b, f);
        CHECK_FALSE(reps[0].pass);
        CHECK(reps[0].max_marginal == 1.0);
    }
    SUBCASE("missing basis") {
        Scenario sc(2, 2, 2);
        const auto b = BehaviorTable::sparse(sc, {0}, {0.5, 0, 0, 0.5});
        CHECK_THROWS_AS(check_theorem1(b, build_functional(sc)), Error);
    }
}

TEST_CASE("marginal bound holds on random nonsignaling behaviors") {
    CounterRng rng(41, 0);
    for (auto [n, m, d] : {std::tuple{2, 2, 2}, {2, 3, 3}, {3, 2, 2}, {3, 3, 2}, {3, 2, 3}, {4, 2, 2}}) {
        Scenario sc(n, m, d);
        const auto f = build_functional(sc);
        for (int trial = 0; trial < 40; ++trial) {
            const auto b = random_nonsignaling_behavior(sc, rng, 1 + trial % 4);
            REQUIRE(oracle::max_signaling(b) < 1e-12);
            for (const auto& r : check_theorem1(b, f)) CHECK(r.pass);
        }
    }
}

TEST_CASE("mean of a dit against its nonzero probability") {
    SUBCASE("examples") {
        const std::vector<double> fair{0.5, 0.5};
        auto r = check_eq13(fair);
        CHECK(r.expectation == 0.5);
        CHECK(r.rhs == 0.5);
        CHECK(r.pass);
        const std::vector<double> tri{0.2, 0.3, 0.5};
        r = check_eq13(tri);
        CHECK(std::abs(r.expectation - 1.3) < 1e-15);
        CHECK(std::abs(r.rhs - 0.8) < 1e-15);
        CHECK(r.pass);
        const std::vector<double> point{0, 0, 0, 1};
        r = check_eq13(point);
        CHECK(r.expectation == 3.0);
        CHECK(r.rhs == 1.0);
        const std::vector<double> zero{1, 0, 0};
        r = check_eq13(zero);
        CHECK(r.expectation == 0.0);
        CHECK(r.rhs == 0.0);
        CHECK(r.pass);
    }
    SUBCASE("random distributions") {
        CounterRng rng(42, 0);
        for (int i = 0; i < 10000; ++i) {
            const int d = 2 + i % 9;
            const auto p = random_distribution(d, rng);
            const auto r = check_eq13(p);
            CHECK(r.pass);
            // independent: sum_i i p_i - sum_{i>0} p_i = sum_i (i-1) p_i over i >= 1, never negative
            double slack = 0.0;
            for (int k = 1; k < d; ++k) slack += (k - 1) * p[k];
            CHECK(std::abs((r.expectation - r.rhs) - slack) < 1e-12);
        }
    }
    SUBCASE("bad input") {
        CHECK_THROWS_AS(check_eq13(std::vector<double>{0.5, 0.4}), Error);
        CHECK_THROWS_AS(check_eq13(std::vector<double>{1.5, -0.5}), Error);
        CHECK_THROWS_AS(check_eq13(std::vector<double>{1.0}), Error);
        CHECK_THROWS_AS(check_eq13(std::vector<double>{NAN, 1.0}), Error);
    }
}

TEST_CASE("overlap bound at one basis") {
    SUBCASE("ideal box") {
        Scenario sc(3, 2, 2);
        const auto f = build_functional(sc);
        const auto b = ideal_box(sc);
        const std::vector<int> anchor{0, 1};
        for (const auto& t : f.terms()) {
            const auto r = check_appendixC(b, f, t.settings, anchor);
            CHECK(r.lhs == 1.0);
            CHECK(r.first_marginal == 0.25);
            CHECK(r.second_marginal == 0.25);
            CHECK(r.rhs == 1.0);
            CHECK(r.pass);
            std::vector<int> full{0, 1, r.forced_value};
            CHECK(t.weight(full, 2) == 0);
        }
    }
    SUBCASE("a point mass off the constraint") {
        Scenario sc(2, 2, 2);
        const auto f = build_functional(sc);
        const auto b = BehaviorTable::deterministic(sc, {{0, 0}, {1, 1}});
        const std::vector<int> basis{1, 1};
        const auto r = check_appendixC(b, f, basis, std::vector<int>{0});
        CHECK(r.forced_value == 0);
        CHECK(r.lhs == 0.0);
        CHECK(r.first_marginal == 1.0);
        CHECK(r.second_marginal == 0.0);
        CHECK(r.rhs == 0.0);
        CHECK(r.pass);
    }
    SUBCASE("argument errors") {
        Scenario sc(2, 3, 2);
        const auto f = build_functional(sc);
        const auto b = BehaviorTable::uniform(sc);
        CHECK_THROWS_AS(check_appendixC(b, f, std::vector<int>{1, 2}, std::vector<int>{0}), Error);
        CHECK_THROWS_AS(check_appendixC(b, f, std::vector<int>{1, 1}, std::vector<int>{0, 0}), Error);
        CHECK_THROWS_AS(check_appendixC(b, f, std::vector<int>{1, 1}, std::vector<int>{2}), Error);
    }
    SUBCASE("random nonsignaling behaviors, every basis and anchor") {
        CounterRng rng(43, 0);
        for (auto [n, m, d] : {std::tuple{2, 3, 3}, {3, 2, 2}, {3, 2, 3}}) {
            Scenario sc(n, m, d);
            const auto f = build_functional(sc);
            std::vector<int> head;
            for (int k = 0; k < n - 1; ++k) head.push_back(k);
            int anchor_count = 1;
            for (int k = 0; k < n - 1; ++k) anchor_count *= d;
            for (int trial = 0; trial < 1000 / 3; ++trial) {
                const auto b = random_nonsignaling_behavior(sc, rng);
                const auto& t = f.terms()[static_cast<std::size_t>(trial) % f.terms().size()];
                const auto joint = oracle::marginal(b, head, t.settings);
                for (int a = 0; a < anchor_count; ++a) {
                    std::vector<int> anchor(n - 1);
                    for (int k = n - 2, rest = a; k >= 0; --k, rest /= d) anchor[k] = rest % d;
                    const auto r = check_appendixC(b, f, t.settings, anchor);
                    CHECK(r.pass);
                    CHECK(std::abs(r.first_marginal - joint[a]) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("grid distance sums") {
    for (int d = 2; d <= 12; ++d) {
        const auto g = grid_distance_sums(d);
        CHECK(g.sum == g.expected);
        // independent count: floor(d^2 / 4)
        CHECK(g.sum == d * d / 4);
    }
    CHECK(grid_distance_sums(3).sum == 2);
    CHECK(grid_distance_sums(4).sum == 4);
    CHECK_THROWS_AS(grid_distance_sums(1), Error);
}

TEST_CASE("zero Bell value exactly when no basis has violating mass") {
    SUBCASE("examples") {
        Scenario sc(3, 2, 2);
        const auto f = build_functional(sc);
        CHECK(check_eq10(ideal_box(sc), f).max_violating_mass == 0.0);
        const auto u = check_eq10(BehaviorTable::uniform(sc), f);
        CHECK(u.max_violating_mass == 0.5);
        const auto q = check_eq10(quantum_behavior(QuantumModel(sc), QuantumSupport::full_grid), f);
        CHECK(q.max_violating_mass > 0.0);
        CHECK(q.max_violating_mass < 0.5);
    }
    SUBCASE("property on random behaviors") {
        CounterRng rng(44, 0);
        for (auto [n, m, d] : {std::tuple{2, 2, 3}, {3, 2, 2}, {3, 3, 2}}) {
            Scenario sc(n, m, d);
            const auto f = build_functional(sc);
            for (int trial = 0; trial < 50; ++trial) {
                // every other behavior is the ideal box itself, the rest are mixtures
                const auto b = trial % 2 == 0 ? ideal_box(sc, true) : random_nonsignaling_behavior(sc, rng);
                const bool zero_value = std::abs(evaluate(f, b)) < 1e-12;
                const bool zero_mass = check_eq10(b, f).max_violating_mass < 1e-12;
                CHECK(zero_value == zero_mass);
                CHECK(zero_value == (trial % 2 == 0));
            }
        }
    }
}

TEST_CASE("random behavior generators") {
    CounterRng rng(45, 0);
    Scenario sc(3, 3, 2);
    for (int i = 0; i < 20; ++i) {
        const auto ns = random_nonsignaling_behavior(sc, rng);
        CHECK(check_normalization(ns, {1e-12, 1e-12}).pass);
        CHECK(oracle::max_signaling(ns) < 1e-12);
        const auto any = random_behavior(sc, rng);
        CHECK(check_normalization(any, {1e-12, 1e-12}).pass);
    }
    CHECK(oracle::max_signaling(random_behavior(sc, rng)) > 1e-3);
}
