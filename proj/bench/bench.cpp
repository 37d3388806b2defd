// Wall-clock comparison of the OpenMP kernels against the serial reference kernels.
// Usage: svlab_bench [repeats]

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <string>

#include <omp.h>

#include "svlab/classical.hpp"
#include "svlab/quantum.hpp"
#include "svlab/reference.hpp"
#include "svlab/secret_sharing.hpp"
#include "svlab/theorems.hpp"

using namespace svlab;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const std::string& name, double serial, double parallel) {
    std::cout << std::left << std::setw(38) << name << std::right << std::fixed << std::setprecision(4)
              << std::setw(11) << serial << std::setw(11) << parallel << std::setprecision(2) << std::setw(9)
              << serial / parallel << "x\n";
}

volatile double sink = 0.0;

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    std::cout << "threads " << omp_get_max_threads() << ", best of " << repeats << "\n";
    std::cout << std::left << std::setw(38) << "kernel" << std::right << std::setw(11) << "serial s" << std::setw(11)
              << "openmp s" << std::setw(10) << "speedup" << "\n";

    {
        QuantumModel qm(Scenario(4, 6, 3));
        row("quantum behavior (4,6,3) full grid",
            best_of(repeats, [&] { sink = reference::quantum_behavior(qm, QuantumSupport::full_grid).raw()[0]; }),
            best_of(repeats, [&] { sink = quantum_behavior(qm, QuantumSupport::full_grid).raw()[0]; }));
    }
    {
        Scenario sc(5, 4, 2);
        const auto f = build_functional(sc);
        CounterRng rng(1, 0);
        const auto b = random_behavior(sc, rng);
        row("evaluate (5,4,2)", best_of(repeats, [&] { sink = reference::evaluate(f, b); }),
            best_of(repeats, [&] { sink = evaluate(f, b); }));
    }
    {
        const auto f = build_functional(Scenario(2, 4, 3));
        row("local minimum (2,4,3)", best_of(repeats, [&] { sink = double(reference::min_local(f).weight_sum); }),
            best_of(repeats, [&] { sink = min_local(f).minimum; }));
    }
    {
        const auto f = build_functional(Scenario(3, 2, 3));
        row("bilocal minimum (3,2,3)",
            best_of(repeats,
                    [&] {
                        long long best = 0;
                        for (const auto& g : bipartitions(3)) best += reference::min_bilocal(f, g).weight_sum;
                        sink = double(best);
                    }),
            best_of(repeats, [&] { sink = min_bilocal(f).minimum; }));
    }
    {
        ProtocolConfig cfg;
        cfg.scenario = Scenario(3, 8, 2);
        cfg.rounds = 1'000'000;
        cfg.seed = 3;
        const auto src = protocol_source(cfg);
        row("protocol (3,8,2), 1e6 rounds", best_of(repeats, [&] { sink = reference::run_protocol(cfg, src).sift_rate; }),
            best_of(repeats, [&] { sink = run_protocol(cfg, src).sift_rate; }));
    }
    return 0;
}
