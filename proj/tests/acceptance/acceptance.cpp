// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [report.json]

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <omp.h>

#include "oracles.hpp"
#include "svlab/classical.hpp"
#include "svlab/cli.hpp"
#include "svlab/nonsignaling.hpp"
#include "svlab/quantum.hpp"
#include "svlab/rng.hpp"
#include "svlab/secret_sharing.hpp"
#include "svlab/theorems.hpp"

using namespace svlab;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
    json detail = json::object();

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
};

std::string fmt(double x, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json cli_report(const std::vector<std::string>& args, int& code) {
    std::vector<const char*> argv{"svlab"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return code == cli::kExitUsage ? json() : json::parse(out.str());
}

Outcome local_bound() {
    Outcome o;
    for (auto [n, m, d] : {std::tuple{2, 2, 2}, {2, 3, 2}, {2, 2, 3}}) {
        const auto t0 = std::chrono::steady_clock::now();
        int code = 0;
        const auto r = cli_report({"bound", "--model", "local", "--n", std::to_string(n), "--m", std::to_string(m),
                                   "--d", std::to_string(d)},
                                  code);
        const double secs = seconds_since(t0);
        const std::string tag = "(" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(d) + ")";
        o.require(code == cli::kExitOk, tag + " exit code");
        if (code != cli::kExitOk) continue;
        const auto& res = r["result"];
        const long long want = static_cast<long long>(d - 1) * res["regularization_denominator"].get<long long>();
        o.require(res["weight_sum"].get<long long>() == want, tag + " minimum is exactly d-1");
        o.require(res["evaluations"].get<std::uint64_t>() ==
                      checked_pow(static_cast<std::uint64_t>(d), n * m),
                  tag + " exhaustive");
        o.require(secs < 10.0, tag + " under 10 s");
        o.notes.push_back(tag + " min " + fmt(res["minimum"].get<double>()) + " in " + fmt(secs, 3) + " s");
    }
    return o;
}

Outcome bilocal_bound() {
    Outcome o;
    for (auto [d, bipartition_strategies] : {std::pair{2, 1024ULL}, {3, 0ULL}}) {
        const auto t0 = std::chrono::steady_clock::now();
        int code = 0;
        const auto r = cli_report({"bound", "--model", "bilocal", "--n", "3", "--m", "2", "--d", std::to_string(d)}, code);
        const double secs = seconds_since(t0);
        const std::string tag = "(3,2," + std::to_string(d) + ")";
        o.require(code == cli::kExitOk, tag + " exit code");
        if (code != cli::kExitOk) continue;
        const auto& res = r["result"];
        o.require(res["minimum"].get<double>() == d - 1, tag + " minimum is exactly d-1");
        o.require(res["per_bipartition"].size() == 3, tag + " three bipartitions");
        for (const auto& b : res["per_bipartition"]) {
            o.require(b["minimum"].get<double>() == d - 1, tag + " every bipartition at d-1");
            if (bipartition_strategies != 0) {
                o.require(b["evaluations"].get<std::uint64_t>() == bipartition_strategies, tag + " exhaustive");
            }
        }
        o.require(secs < 60.0, tag + " under 1 min");
        o.notes.push_back(tag + " min " + fmt(res["minimum"].get<double>()) + " over " +
                          std::to_string(res["evaluations"].get<std::uint64_t>()) + " strategies in " + fmt(secs, 3) +
                          " s");
    }
    return o;
}

Outcome quantum_scaling() {
    Outcome o;
    std::vector<int> all_m;
    for (int m = 2; m <= 64; ++m) all_m.push_back(m);
    const std::vector<int> fit_m{8, 16, 32, 64};
    const std::vector<int> tail_m{64, 128};
    json constants = json::array();
    for (int d : {2, 3}) {
        for (int n : {2, 3}) {
            const std::string tag = "(N=" + std::to_string(n) + ",d=" + std::to_string(d) + ")";
            const auto full = bell_value_vs_m(n, d, all_m);
            bool below = true;
            for (const auto& r : full.rows) below = below && r.exact < d - 1;
            o.require(below, tag + " value below d-1 for M in 2..64");
            const auto fit = bell_value_vs_m(n, d, fit_m);
            o.require(fit.loglog_slope >= -1.05 && fit.loglog_slope <= -0.95, tag + " slope in [-1.05,-0.95]");
            const auto tail = bell_value_vs_m(n, d, tail_m);
            const double rel = std::abs(tail.rows[1].ratio - tail.rows[0].ratio) / tail.rows[0].ratio;
            o.require(rel < 0.01, tag + " ratio change between M=64 and M=128 below 1%");
            constants.push_back({{"n", n},
                                 {"d", d},
                                 {"slope", fit.loglog_slope},
                                 {"ratio_m128", tail.rows[1].ratio},
                                 {"ratio_relative_change", rel}});
            o.notes.push_back(tag + " slope " + fmt(fit.loglog_slope, 5) + ", ratio " +
                              fmt(tail.rows[1].ratio, 6) + " (change " + fmt(rel, 3) + ")");
        }
    }
    o.detail["ratio_constants"] = constants;
    return o;
}

Outcome equality_across_n() {
    Outcome o;
    double worst = 0.0;
    for (int d : {2, 3}) {
        for (int m : {2, 4, 8}) worst = std::max(worst, check_eq9_equality(d, m, std::vector<int>{2, 3, 4}));
    }
    o.require(worst < 1e-9, "max difference below 1e-9");
    o.notes.push_back("max difference " + fmt(worst, 3));
    o.detail["max_difference"] = worst;
    return o;
}

Outcome nonsignaling_floor() {
    Outcome o;
    for (auto [n, m, d] : {std::tuple{2, 2, 2}, {2, 3, 2}, {3, 2, 2}}) {
        Scenario sc(n, m, d);
        const std::string tag = "(" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(d) + ")";
        const auto r = min_bell_ns(sc);
        o.require(r.lp.status == LpSolution::Status::optimal, tag + " LP optimal");
        o.require(std::abs(r.value) <= 1e-8, tag + " LP minimum 0 within 1e-8");
        const auto exact = evaluate_exact(build_functional(sc), ideal_box_exact(sc));
        o.require(exact == 0, tag + " ideal box exactly 0");
        o.notes.push_back(tag + " LP " + fmt(r.value, 3) + ", box " + exact.str());
    }
    return o;
}

Outcome theorem1() {
    Outcome o;
    const std::vector<double> eps{0.0, 0.01, 0.05, 0.1};
    for (int n : {2, 3}) {
        Scenario sc(n, 2, 2);
        const auto f = build_functional(sc);
        const std::string tag = "(" + std::to_string(n) + ",2,2)";
        const double floor = 1.0 / std::pow(2.0, n - 1);
        double worst_excess = -1.0;
        for (int excluded = 0; excluded < n; ++excluded) {
            for (const auto& t : f.terms()) {
                const auto pts =
                    theorem1_probe(sc, excluded, t.settings, std::vector<int>(static_cast<std::size_t>(n - 1), 0), eps);
                o.require(pts[0].status == LpSolution::Status::optimal && std::abs(pts[0].lp_value - floor) <= 1e-7,
                          tag + " eps=0 marginal equals 1/d^(N-1)");
                for (std::size_t i = 1; i < pts.size(); ++i) {
                    o.require(pts[i].status == LpSolution::Status::optimal, tag + " LP optimal");
                    worst_excess = std::max(worst_excess, pts[i].lp_value - pts[i].bound);
                    o.require(pts[i].lp_value <= pts[i].bound + 1e-7, tag + " LP value within bound");
                }
            }
        }
        o.notes.push_back(tag + " max LP value minus bound " + fmt(worst_excess, 3));
    }

    // (c) every behavior the repo generates
    std::size_t checked = 0;
    const auto all_pass = [&](const BehaviorTable& b, const std::string& what) {
        const auto f = build_functional(b.scenario());
        bool ok = true;
        for (const auto& r : check_theorem1(b, f)) ok = ok && r.pass;
        o.require(ok, "check_theorem1 on " + what);
        ++checked;
    };
    CounterRng rng(606, 0);
    const std::vector<std::tuple<int, int, int>> scenarios{{2, 2, 2}, {2, 3, 2}, {3, 2, 2}, {3, 2, 3}};
    for (auto [n, m, d] : scenarios) {
        Scenario sc(n, m, d);
        all_pass(quantum_behavior(QuantumModel(sc), QuantumSupport::full_grid), "quantum behavior");
        all_pass(ideal_box(sc), "ideal box");
        all_pass(ideal_box(sc, true), "padded ideal box");
        const auto r = min_bell_ns(sc);
        if (r.lp.behavior) all_pass(*r.lp.behavior, "LP optimum");
        for (int eps_i : {1, 2}) {
            const std::vector<double> e{0.05 * eps_i};
            const auto lp = theorem1_problem(sc, n - 1, build_functional(sc).terms().front().settings,
                                             std::vector<int>(static_cast<std::size_t>(n - 1), 0), e.front());
            auto sol = solve(lp);
            attach_behavior(sol, sc, {1e-8, 1e-8});
            if (sol.behavior) all_pass(*sol.behavior, "theorem1 LP optimum");
        }
    }
    for (int i = 0; i < 1000; ++i) {
        auto [n, m, d] = scenarios[static_cast<std::size_t>(i) % scenarios.size()];
        all_pass(random_nonsignaling_behavior(Scenario(n, m, d), rng, 1 + i % 5), "random polytope mixture");
    }
    o.notes.push_back(std::to_string(checked) + " generated behaviors checked");
    return o;
}

Outcome monogamy() {
    Outcome o;
    for (int n : {2, 3}) {
        Scenario sc(n, 2, 2);
        const auto f = build_functional(sc);
        double worst = 0.0;
        for (int target = 0; target < n; ++target) {
            const auto r = monogamy_probe(ideal_box(sc), target, f.terms().front().settings);
            o.require(r.lp.status == LpSolution::Status::optimal, "LP optimal");
            worst = std::max(worst, std::abs(r.guessing_probability - 0.5));
        }
        o.require(worst <= 1e-7, "(" + std::to_string(n) + ",2,2) guessing probability 1/d");
        o.notes.push_back("(" + std::to_string(n) + ",2,2) max |P_guess - 1/2| " + fmt(worst, 3));
    }
    return o;
}

Outcome proof_machinery() {
    Outcome o;
    CounterRng rng(808, 0);
    bool eq13 = true;
    for (int i = 0; i < 10000; ++i) eq13 = eq13 && check_eq13(random_distribution(2 + i % 5, rng)).pass;
    o.require(eq13, "mean-versus-nonzero identity on 1e4 distributions");

    Scenario sc(3, 2, 2);
    const auto f = build_functional(sc);
    std::uint64_t overlap_checks = 0;
    bool overlap = true;
    for (int i = 0; i < 1000; ++i) {
        const auto b = random_nonsignaling_behavior(sc, rng, 1 + i % 4);
        for (const auto& t : f.terms()) {
            for (int a = 0; a < 4; ++a) {
                const std::vector<int> anchor{a / 2, a % 2};
                overlap = overlap && check_appendixC(b, f, t.settings, anchor).pass;
                ++overlap_checks;
            }
        }
    }
    o.require(overlap, "overlap bound on 1e3 nonsignaling behaviors");

    bool sums = true;
    for (int d = 2; d <= 12; ++d) {
        const auto g = grid_distance_sums(d);
        const long long want = d % 2 == 1 ? (d * d - 1) / 4 : d * d / 4;
        sums = sums && g.sum == want;
    }
    o.require(sums, "grid distance sums for d in 2..12");

    double worst_sym = 0.0;
    for (auto [n, perm] : {std::pair{3, std::vector<int>{2, 1, 0}}, {4, std::vector<int>{0, 3, 2, 1}}}) {
        Scenario s(n, 2, 2);
        const auto fn = build_functional(s);
        for (int i = 0; i < 100; ++i) {
            worst_sym = std::max(worst_sym, check_permutation_symmetry(fn, random_behavior(s, rng), perm));
        }
    }
    o.require(worst_sym < 1e-12, "Bell value unchanged under A<->C and X<->Z");
    o.notes.push_back(std::to_string(overlap_checks) + " overlap checks; symmetry gap " + fmt(worst_sym, 3));
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    CounterRng rng(909, 0);
    double worst = 0.0;
    for (auto [n, m, d] : {std::tuple{2, 2, 2}, {2, 8, 3}, {3, 4, 2}, {4, 2, 2}}) {
        QuantumModel qm(Scenario(n, m, d));
        for (int i = 0; i < 1000; ++i) {
            std::vector<int> s(n), r(n);
            for (auto& x : s) x = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
            for (auto& x : r) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
            const double closed = joint_probability(qm, s, r);
            worst = std::max(worst, std::abs(closed - oracle::ghz_probability(n, m, d, s, r)));
            worst = std::max(worst, std::abs(closed - joint_probability_direct(qm, s, r)));
        }
    }
    o.require(worst < 1e-12, "closed form against state vector within 1e-12");
    o.notes.push_back("max difference " + fmt(worst, 3));
    return o;
}

Outcome secret_sharing() {
    Outcome o;
    ProtocolConfig cfg;
    cfg.scenario = Scenario(3, 8, 2);
    cfg.rounds = 100000;
    cfg.seed = 20241019;
    const auto t = run_protocol(cfg);
    const double p = 2.0 / 8.0;
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(cfg.rounds));
    o.require(std::abs(t.sift_rate - p) <= 3 * sigma, "sift rate within 3 sigma of 2/M");
    double worst_sigma = 0.0;
    const double n_sift = static_cast<double>(t.sifted_rounds);
    for (const auto& counts : t.marginal_counts) {
        const double freq = static_cast<double>(counts[0]) / n_sift;
        worst_sigma = std::max(worst_sigma, std::abs(freq - 0.5) / std::sqrt(0.25 / n_sift));
    }
    o.require(worst_sigma <= 3.0, "single-party frequencies within 3 sigma of 1/2");

    auto box_cfg = cfg;
    box_cfg.source = SourceKind::ideal_box;
    const auto box = run_protocol(box_cfg);
    o.require(box.errors == 0, "ideal box yields no reconstruction errors");

    const int procs = omp_get_num_procs();
    omp_set_num_threads(1);
    const auto again = run_protocol(cfg);
    omp_set_num_threads(procs);
    o.require(again.rounds_csv() == t.rounds_csv(), "same seed reproduces the transcript byte for byte");

    o.notes.push_back("sift " + fmt(t.sift_rate) + " (" + fmt((t.sift_rate - p) / sigma, 3) +
                      " sigma), worst marginal " + fmt(worst_sigma, 3) + " sigma, quantum error rate " +
                      fmt(t.error_rate, 4) + ", box errors " + std::to_string(box.errors));
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"local bound", local_bound},
        {"bilocal bound", bilocal_bound},
        {"quantum violation and scaling", quantum_scaling},
        {"equal Bell value across N", equality_across_n},
        {"nonsignaling floor", nonsignaling_floor},
        {"marginal bound", theorem1},
        {"monogamy probe", monogamy},
        {"proof identities and symmetries", proof_machinery},
        {"closed-form oracle equivalence", oracle_equivalence},
        {"secret sharing", secret_sharing},
    };
    json report = json::array();
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        const double secs = seconds_since(t0);
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << i + 1 << "  " << criteria[i].first << "  ["
                  << fmt(secs, 3) << " s]";
        for (const auto& n : o.notes) std::cout << "\n        " << n;
        std::cout << std::endl;
        report.push_back({{"criterion", i + 1},
                          {"name", criteria[i].first},
                          {"pass", o.pass},
                          {"seconds", secs},
                          {"notes", o.notes},
                          {"detail", o.detail}});
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    if (argc > 1) std::ofstream(argv[1]) << json{{"criteria", report}, {"pass", failures == 0}}.dump(2) << '\n';
    return failures == 0 ? 0 : 1;
}
