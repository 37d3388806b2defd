#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "svlab/classical.hpp"
#include "svlab/quantum.hpp"
#include "svlab/reference.hpp"
#include "svlab/secret_sharing.hpp"
#include "svlab/theorems.hpp"

using namespace svlab;

namespace {

const int kThreadCounts[] = {1, 2, 4};

struct ThreadScope {
    ~ThreadScope() { omp_set_num_threads(omp_get_num_procs()); }
};

}  // namespace

TEST_CASE("quantum behavior tables") {
    ThreadScope guard;
    for (auto [n, m, d] : {std::tuple{2, 5, 3}, {3, 3, 2}, {4, 2, 3}}) {
        QuantumModel qm(Scenario(n, m, d));
        for (auto support : {QuantumSupport::full_grid, QuantumSupport::inequality_bases}) {
            const auto ref = reference::quantum_behavior(qm, support);
            for (int t : kThreadCounts) {
                omp_set_num_threads(t);
                const auto fast = quantum_behavior(qm, support);
                REQUIRE(std::ranges::equal(fast.support(), ref.support()));
                REQUIRE(fast.raw().size() == ref.raw().size());
                double worst = 0.0;
                for (std::size_t i = 0; i < fast.raw().size(); ++i) {
                    worst = std::max(worst, std::abs(fast.raw()[i] - ref.raw()[i]));
                }
                CHECK(worst < 1e-13);
            }
        }
    }
}

TEST_CASE("Bell value evaluation") {
    ThreadScope guard;
    CounterRng rng(61, 0);
    for (auto [n, m, d] : {std::tuple{2, 7, 3}, {3, 4, 2}, {5, 2, 2}}) {
        Scenario sc(n, m, d);
        const auto f = build_functional(sc);
        const auto b = random_behavior(sc, rng);
        const double ref = reference::evaluate(f, b);
        for (int t : kThreadCounts) {
            omp_set_num_threads(t);
            CHECK(std::abs(evaluate(f, b) - ref) < 1e-12);
        }
    }
}

TEST_CASE("strategy enumeration") {
    ThreadScope guard;
    for (auto [n, m, d] : {std::tuple{2, 3, 3}, {3, 2, 2}, {3, 2, 3}}) {
        const auto f = build_functional(Scenario(n, m, d));
        const auto ref_local = reference::min_local(f);
        for (int t : kThreadCounts) {
            omp_set_num_threads(t);
            const auto fast = min_local(f);
            CHECK(fast.weight_sum == ref_local.weight_sum);
            CHECK(fast.witness_index == ref_local.witness_index);
            if (n < 3) continue;
            for (const auto& bp : min_bilocal(f).per_bipartition) {
                const auto ref = reference::min_bilocal(f, bp.group);
                CHECK(bp.weight_sum == ref.weight_sum);
                CHECK(bp.witness_index == ref.witness_index);
            }
        }
    }
}

TEST_CASE("protocol transcripts") {
    ThreadScope guard;
    ProtocolConfig cfg;
    cfg.scenario = Scenario(3, 4, 3);
    cfg.rounds = 20000;
    cfg.seed = 2024;
    const auto src = protocol_source(cfg);
    const auto ref = reference::run_protocol(cfg, src);
    for (int t : kThreadCounts) {
        omp_set_num_threads(t);
        const auto fast = run_protocol(cfg, src);
        CHECK(fast.rounds_csv() == ref.rounds_csv());
        CHECK(fast.errors == ref.errors);
        CHECK(fast.bell_estimate == ref.bell_estimate);
    }
}
