#include "svlab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>

#include "svlab/nonsignaling.hpp"
#include "svlab/quantum.hpp"
#include "svlab/secret_sharing.hpp"
#include "svlab/theorems.hpp"

namespace svlab::cli {

using nlohmann::json;

json to_json(const RunConfig& c) {
    return {
        {"subcommand", c.subcommand},
        {"n", c.n},
        {"m", c.m},
        {"d", c.d},
        {"tolerances", {{"norm", c.tol.norm}, {"ns", c.tol.ns}}},
        {"caps", {{"enumeration", c.enumeration_cap}, {"lp_columns", c.lp_column_cap}, {"table", c.table_cap}}},
        {"threads", c.threads},
        {"report", c.report_path},
        {"csv", c.csv_path},
        {"behavior", c.behavior_path},
        {"dump", c.dump_path},
        {"model", c.model},
        {"group", c.group},
        {"m_list", c.m_list},
        {"n_list", c.n_list},
        {"d_list", c.d_list},
        {"task", c.task},
        {"exact", c.exact},
        {"eps", c.eps},
        {"party", c.party},
        {"setting", c.setting},
        {"target", c.target},
        {"rounds", c.rounds},
        {"seed", c.seed},
        {"source", c.source},
    };
}

namespace {

std::uint64_t env_cap(const char* name, std::uint64_t fallback) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return fallback;
    try {
        std::size_t pos = 0;
        const auto x = std::stoull(v, &pos);
        if (pos != std::string(v).size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw Error(std::string("environment variable ") + name + " is not an integer: " + v);
    }
}

}  // namespace

RunConfig defaults_from_environment() {
    RunConfig c;
    c.enumeration_cap = env_cap("SVLAB_ENUM_CAP", c.enumeration_cap);
    c.lp_column_cap = env_cap("SVLAB_LP_CAP", c.lp_column_cap);
    c.table_cap = env_cap("SVLAB_TABLE_CAP", c.table_cap);
    return c;
}

namespace {

/// Collects named checks with the tolerance each was asserted under.
class Checks {
public:
    void add(const std::string& name, bool pass, json value, json tolerance = nullptr) {
        json c = {{"name", name}, {"pass", pass}, {"value", std::move(value)}};
        if (!tolerance.is_null()) c["tolerance"] = std::move(tolerance);
        items_.push_back(std::move(c));
        all_ = all_ && pass;
    }
    void skip(const std::string& name, const std::string& reason) {
        items_.push_back({{"name", name}, {"skipped", reason}});
    }
    bool pass() const { return all_; }
    const json& items() const { return items_; }
    std::vector<std::string> failed() const {
        std::vector<std::string> out;
        for (const auto& c : items_) {
            if (c.contains("pass") && !c["pass"].get<bool>()) out.push_back(c["name"]);
        }
        return out;
    }

private:
    json items_ = json::array();
    bool all_ = true;
};

Scenario scenario_of(const RunConfig& c) { return Scenario(c.n, c.m, c.d, c.table_cap); }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << text;
    if (!f) throw Error("failed writing " + path);
}

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw Error("malformed JSON in " + path + ": " + e.what());
    }
}

SolveOptions solve_options(const RunConfig& c) {
    SolveOptions o;
    o.exact = c.exact;
    o.column_cap = c.lp_column_cap;
    return o;
}

json lp_json(const LpSolution& s) {
    json j = {
        {"status", to_string(s.status)},
        {"objective", s.objective},
        {"iterations", s.iterations},
        {"primal_residual", s.primal_residual},
        {"dual_infeasibility", s.dual_infeasibility},
        {"complementary_slackness", s.complementary_slackness},
        {"duality_gap", s.duality_gap},
    };
    if (s.exact_objective) j["exact_objective"] = s.exact_objective->str();
    if (!s.message.empty()) j["message"] = s.message;
    return j;
}

std::vector<int> to_zero_based(const std::vector<int>& parties, int n) {
    std::vector<int> out;
    for (int p : parties) {
        if (p < 1 || p > n) throw Error("party " + std::to_string(p) + " out of range 1.." + std::to_string(n));
        out.push_back(p - 1);
    }
    return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    return s + "\n";
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// ---- subcommands ------------------------------------------------------------

json run_terms(const RunConfig& c, Checks& checks) {
    const Scenario sc = scenario_of(c);
    const auto f = build_functional(sc);
    const auto expected = 2 * checked_pow(static_cast<std::uint64_t>(c.m), c.n - 1);
    checks.add("term count is 2 M^(N-1)", f.terms().size() == expected, f.terms().size());
    checks.add("every term touches a distinct setting tuple", f.bases().size() == f.terms().size(), f.bases().size());
    const auto csv = terms_csv(f);
    json result = {{"term_count", f.terms().size()},
                   {"regularization_denominator", f.regularization_denominator()}};
    if (!c.csv_path.empty()) {
        write_file(c.csv_path, csv);
    } else {
        json rows = json::array();
        std::istringstream is(csv);
        std::string line;
        while (std::getline(is, line)) rows.push_back(line);
        result["csv"] = rows;
    }
    return result;
}

json run_quantum(const RunConfig& c, Checks& checks) {
    const auto ms = c.m_list.empty() ? std::vector<int>{2, 4, 8, 16, 32, 64} : c.m_list;
    const auto table = bell_value_vs_m(c.n, c.d, ms);
    json rows = json::array();
    std::string csv = csv_line({"m", "exact", "approximation", "ratio"});
    bool below = true;
    for (const auto& r : table.rows) {
        rows.push_back({{"m", r.m}, {"exact", r.exact}, {"approximation", r.approximation}, {"ratio", r.ratio}});
        csv += csv_line({std::to_string(r.m), num(r.exact), num(r.approximation), num(r.ratio)});
        below = below && r.exact < c.d - 1;
    }
    if (!c.csv_path.empty()) write_file(c.csv_path, csv);
    checks.add("exact value strictly decreasing in M", table.strictly_decreasing, table.strictly_decreasing);
    checks.add("exact value below the bilocal bound d-1", below, c.d - 1);
    return {{"parties", table.parties},
            {"outcomes", table.outcomes},
            {"rows", rows},
            {"loglog_slope", table.loglog_slope},
            {"fitted_constant", table.fitted_constant}};
}

json run_bound(const RunConfig& c, Checks& checks) {
    const Scenario sc = scenario_of(c);
    const auto f = build_functional(sc);
    const long long target = static_cast<long long>(c.d - 1) * static_cast<long long>(f.regularization_denominator());
    json result;
    long long weight_sum = 0;
    if (c.model == "local") {
        const auto r = min_local(f, c.enumeration_cap);
        weight_sum = r.weight_sum;
        result = {{"minimum", r.minimum},
                  {"weight_sum", r.weight_sum},
                  {"witness", svlab::to_json(r.witness)},
                  {"witness_index", r.witness_index},
                  {"evaluations", r.evaluations}};
    } else if (c.model == "bilocal") {
        std::optional<std::vector<int>> only;
        if (!c.group.empty()) only = to_zero_based(c.group, c.n);
        const auto r = min_bilocal(f, c.enumeration_cap, only);
        weight_sum = r.weight_sum;
        json per = json::array();
        for (const auto& b : r.per_bipartition) {
            per.push_back({{"group", b.group},
                           {"complement", b.complement},
                           {"minimum", b.minimum},
                           {"evaluations", b.evaluations},
                           {"witness_index", b.witness_index}});
        }
        result = {{"minimum", r.minimum},
                  {"weight_sum", r.weight_sum},
                  {"witness", svlab::to_json(r.per_bipartition[r.witness_bipartition].witness)},
                  {"evaluations", r.evaluations},
                  {"per_bipartition", per},
                  {"note", "parties in group/complement are 0-based"}};
    } else {
        throw Error("unknown model '" + c.model + "' (expected local or bilocal)");
    }
    result["regularization_denominator"] = f.regularization_denominator();
    checks.add("minimum equals d-1 exactly", weight_sum == target, result["minimum"], "exact integer arithmetic");
    return result;
}

std::vector<int> default_basis(const RunConfig& c, const BellFunctional& f) {
    if (!c.setting.empty()) return c.setting;
    return f.terms().front().settings;
}

json run_ns(const RunConfig& c, Checks& checks) {
    const Scenario sc = scenario_of(c);
    const auto f = build_functional(sc);
    NsOptions opt;
    opt.solve = solve_options(c);
    const auto basis = default_basis(c, f);
    json result;
    if (c.task == "min-bell") {
        if (!c.dump_path.empty()) write_file(c.dump_path, min_bell_problem(sc).dump());
        const auto r = min_bell_ns(sc, opt);
        result = {{"lp", lp_json(r.lp)}, {"value", r.value}, {"marginal_deviation", r.marginal_deviation}};
        const bool ok = r.lp.status == LpSolution::Status::optimal;
        checks.add("LP optimal", ok, to_string(r.lp.status));
        if (ok) {
            checks.add("minimum Bell value is 0", std::abs(r.value) <= 1e-8, r.value, 1e-8);
            checks.add("(N-1)-party marginals on bases are uniform", r.marginal_deviation <= 1e-8,
                       r.marginal_deviation, 1e-8);
            const auto ns = check_nonsignaling(*r.lp.behavior, opt.check);
            checks.add("optimum is nonsignaling", ns.pass, ns.max_violation, opt.check.ns);
        }
        const auto exact_box = evaluate_exact(f, ideal_box_exact(sc));
        result["ideal_box_exact_value"] = exact_box.str();
        checks.add("ideal box evaluates to exactly 0", exact_box == 0, exact_box.str(), "exact rational");
    } else if (c.task == "theorem1") {
        const int excluded = c.party == 0 ? c.n - 1 : to_zero_based({c.party}, c.n)[0];
        const auto target = c.target.empty() ? std::vector<int>(c.n - 1, 0) : c.target;
        const auto eps = c.eps.empty() ? std::vector<double>{0.0, 0.01, 0.05, 0.1} : c.eps;
        if (!c.dump_path.empty()) write_file(c.dump_path, theorem1_problem(sc, excluded, basis, target, eps.front()).dump());
        const auto pts = theorem1_probe(sc, excluded, basis, target, eps, opt);
        json arr = json::array();
        bool all = true;
        for (const auto& p : pts) {
            arr.push_back({{"epsilon", p.epsilon},
                           {"status", to_string(p.status)},
                           {"lp_value", p.lp_value},
                           {"bound", p.bound},
                           {"within_bound", p.within_bound}});
            all = all && p.within_bound;
        }
        result = {{"excluded_party", excluded + 1}, {"setting", basis}, {"target", target}, {"points", arr}};
        checks.add("LP marginal never exceeds 1/d^(N-1) + d(N-1)eps/4", all, all, 1e-7);
    } else if (c.task == "monogamy") {
        const int target = c.party == 0 ? 0 : to_zero_based({c.party}, c.n)[0];
        const bool from_file = !c.behavior_path.empty();
        const auto fixed =
            from_file ? behavior_from_json(read_json_file(c.behavior_path), c.tol) : ideal_box(sc);
        if (!(fixed.scenario() == sc)) throw Error("behavior scenario does not match --n/--m/--d");
        if (!c.dump_path.empty()) write_file(c.dump_path, monogamy_problem(fixed, target, basis).dump());
        const auto r = monogamy_probe(fixed, target, basis, opt);
        result = {{"lp", lp_json(r.lp)},
                  {"guessing_probability", r.guessing_probability},
                  {"target_party", target + 1},
                  {"setting", basis},
                  {"fixed_behavior", from_file ? c.behavior_path : "ideal-box"}};
        checks.add("LP optimal", r.lp.status == LpSolution::Status::optimal, to_string(r.lp.status));
        if (!from_file) {
            const double want = 1.0 / c.d;
            checks.add("guessing probability is 1/d", std::abs(r.guessing_probability - want) <= 1e-7,
                       r.guessing_probability, 1e-7);
        }
    } else if (c.task == "uniqueness") {
        const auto r = uniqueness_check(sc, basis);
        json sol = json::array();
        for (const auto& v : r.solution) sol.push_back(v.str());
        result = {{"setting", basis},   {"unknowns", r.unknowns}, {"equations", r.equations},
                  {"rank", r.rank},     {"consistent", r.consistent}, {"unique", r.unique},
                  {"solution", sol},    {"equals_ideal_box", r.equals_ideal_box}};
        checks.add("single-basis solution is unique", r.unique, r.rank, "exact rational");
        checks.add("solution equals the ideal box", r.equals_ideal_box, r.equals_ideal_box, "exact rational");
    } else {
        throw Error("unknown task '" + c.task + "' (expected min-bell, theorem1, monogamy or uniqueness)");
    }
    return result;
}

json run_verify(const RunConfig& c, Checks& checks) {
    if (c.behavior_path.empty()) throw Error("verify needs --behavior");
    const auto b = behavior_from_json(read_json_file(c.behavior_path), c.tol, BehaviorTable::Validation::unchecked);
    const Scenario& sc = b.scenario();
    json result = {{"scenario", {{"n", sc.parties()}, {"m", sc.settings()}, {"d", sc.outcomes()}}},
                   {"full_grid", b.is_full_grid()},
                   {"supported_settings", b.support().size()}};

    const auto norm = check_normalization(b, c.tol);
    checks.add("normalization", norm.pass,
               {{"max_deviation", norm.max_deviation},
                {"most_negative", norm.most_negative},
                {"worst_setting", norm.worst_setting}},
               c.tol.norm);
    const std::vector<std::string> later = {"nonsignaling", "bell value nonnegative", "marginal bound",
                                            "zero violating mass iff zero Bell value", "overlap bound at every basis"};
    if (!norm.pass) {
        for (const auto& name : later) checks.skip(name, "behavior is not normalized");
        return result;
    }
    if (b.is_full_grid()) {
        const auto ns = check_nonsignaling(b, c.tol);
        checks.add("nonsignaling", ns.pass,
                   {{"max_violation", ns.max_violation},
                    {"party", ns.party < 0 ? json(nullptr) : json(party_name(ns.party))}},
                   c.tol.ns);
    } else {
        checks.skip("nonsignaling", "sparse support; needs the full setting grid");
    }
    const auto f = build_functional(sc);
    bool bases = true;
    for (auto s : f.bases()) bases = bases && b.supports(s);
    if (!bases) {
        for (std::size_t i = 1; i < later.size(); ++i) checks.skip(later[i], "behavior misses inequality bases");
        return result;
    }
    const double value = evaluate(f, b);
    result["bell_value"] = value;
    checks.add("bell value nonnegative", value >= -kBehaviorCheckTolerance, value, kBehaviorCheckTolerance);

    const auto t1 = check_theorem1(b, f);
    bool t1_pass = true;
    json t1j = json::array();
    for (const auto& r : t1) {
        t1_pass = t1_pass && r.pass;
        t1j.push_back({{"subset", r.subset}, {"max_marginal", r.max_marginal}, {"bound", r.bound}, {"pass", r.pass}});
    }
    checks.add("marginal bound", t1_pass, t1j, kBehaviorCheckTolerance);

    const auto e10 = check_eq10(b, f);
    const bool zero_mass = e10.max_violating_mass <= kIdentityTolerance;
    const bool zero_value = std::abs(value) <= kIdentityTolerance;
    checks.add("zero violating mass iff zero Bell value", zero_mass == zero_value,
               {{"max_violating_mass", e10.max_violating_mass}, {"worst_basis", e10.worst_basis}},
               kIdentityTolerance);

    std::uint64_t total = 0, passed = 0;
    const std::uint64_t anchors = sc.outcome_count() / static_cast<std::uint64_t>(sc.outcomes());
    for (const auto& t : f.terms()) {
        for (std::uint64_t a = 0; a < anchors; ++a) {
            std::vector<int> anchor(sc.parties() - 1);
            std::uint64_t rem = a;
            for (std::size_t k = anchor.size(); k-- > 0;) {
                anchor[k] = static_cast<int>(rem % static_cast<std::uint64_t>(sc.outcomes()));
                rem /= static_cast<std::uint64_t>(sc.outcomes());
            }
            ++total;
            if (check_appendixC(b, f, t.settings, anchor).pass) ++passed;
        }
    }
    checks.add("overlap bound at every basis", passed == total, {{"passed", passed}, {"total", total}},
               kIdentityTolerance);
    return result;
}

json run_share(const RunConfig& c, Checks&) {
    ProtocolConfig cfg;
    cfg.scenario = scenario_of(c);
    cfg.rounds = c.rounds;
    cfg.seed = c.seed;
    cfg.source = source_from_string(c.source);
    if (cfg.source == SourceKind::file) {
        if (c.behavior_path.empty()) throw Error("--source file needs --behavior");
        cfg.behavior = behavior_from_json(read_json_file(c.behavior_path), c.tol);
    }
    const auto t = run_protocol(cfg);
    if (!c.csv_path.empty()) write_file(c.csv_path, t.rounds_csv());
    json result = {{"transcript", svlab::to_json(t)}};
    try {
        result["security"] = svlab::to_json(security_report(t));
    } catch (const Error& e) {
        result["security"] = {{"error", e.what()}};
    }
    return result;
}

json run_asymptotics(const RunConfig& c, Checks& checks) {
    const auto ns = c.n_list.empty() ? std::vector<int>{2, 3} : c.n_list;
    const auto ds = c.d_list.empty() ? std::vector<int>{2, 3} : c.d_list;
    const auto ms = c.m_list.empty() ? std::vector<int>{8, 16, 32, 64, 128} : c.m_list;
    if (ms.size() < 2) throw Error("asymptotics needs at least two values in --m-list");
    json families = json::array();
    for (int d : ds) {
        for (int n : ns) {
            const auto t = bell_value_vs_m(n, d, ms);
            const auto& last = t.rows.back();
            const auto& prev = t.rows[t.rows.size() - 2];
            const double rel = std::abs(last.ratio - prev.ratio) / std::abs(prev.ratio);
            const double approx_constant = large_m_approximation(1, d);
            families.push_back({{"n", n},
                                {"d", d},
                                {"loglog_slope", t.loglog_slope},
                                {"fitted_constant", t.fitted_constant},
                                {"approximation_constant", approx_constant},
                                {"ratio_exact_to_approximation", last.ratio},
                                {"ratio_relative_change_last_two", rel},
                                {"strictly_decreasing", t.strictly_decreasing}});
            const std::string tag = " (N=" + std::to_string(n) + ", d=" + std::to_string(d) + ")";
            checks.add("log-log slope in [-1.05, -0.95]" + tag, t.loglog_slope >= -1.05 && t.loglog_slope <= -0.95,
                       t.loglog_slope, json::array({-1.05, -0.95}));
            checks.add("ratio to the large-M formula settles" + tag, rel < 0.01, rel, 0.01);
        }
    }
    json eq9 = json::array();
    for (int d : ds) {
        for (int m : {2, 4, 8}) {
            const std::vector<int> nl = {2, 3, 4};
            const double diff = check_eq9_equality(d, m, nl);
            eq9.push_back({{"d", d}, {"m", m}, {"n", nl}, {"max_difference", diff}});
            checks.add("equal Bell value across N (d=" + std::to_string(d) + ", M=" + std::to_string(m) + ")",
                       diff < 1e-9, diff, 1e-9);
        }
    }
    return {{"families", families}, {"equality_across_n", eq9}};
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = defaults_from_environment();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App app{"Chained Svetlichny inequality verification lab"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto common = [&cfg](CLI::App* s, bool scenario) {
        if (scenario) {
            s->add_option("--n", cfg.n, "parties")->check(CLI::Range(2, 16));
            s->add_option("--m", cfg.m, "settings per party")->check(CLI::Range(2, 1 << 20));
            s->add_option("--d", cfg.d, "outcomes per setting")->check(CLI::Range(2, 1 << 20));
        }
        s->add_option("--report", cfg.report_path, "write the JSON report here instead of stdout");
        s->add_option("--threads", cfg.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
        s->add_option("--tol-norm", cfg.tol.norm, "normalization tolerance");
        s->add_option("--tol-ns", cfg.tol.ns, "nonsignaling tolerance");
        s->add_option("--enum-cap", cfg.enumeration_cap, "strategy enumeration cap");
        s->add_option("--lp-cap", cfg.lp_column_cap, "LP column cap");
        s->add_option("--table-cap", cfg.table_cap, "behavior table entry cap");
    };

    auto* terms = app.add_subcommand("terms", "list the functional's terms");
    common(terms, true);
    terms->add_option("--csv", cfg.csv_path, "write the term list as CSV");

    auto* quantum = app.add_subcommand("quantum", "GHZ Bell value against M");
    common(quantum, true);
    quantum->add_option("--m-list", cfg.m_list, "comma-separated M values")->delimiter(',');
    quantum->add_option("--csv", cfg.csv_path, "write the convergence table as CSV");

    auto* bound = app.add_subcommand("bound", "exhaustive local or bilocal minimum");
    common(bound, true);
    bound->add_option("--model", cfg.model, "local or bilocal")->check(CLI::IsMember({"local", "bilocal"}));
    bound->add_option("--group", cfg.group, "restrict to one bipartition (1-based parties)")->delimiter(',');

    auto* ns = app.add_subcommand("ns", "nonsignaling linear programs");
    common(ns, true);
    ns->add_option("--task", cfg.task, "min-bell, theorem1, monogamy or uniqueness")
        ->check(CLI::IsMember({"min-bell", "theorem1", "monogamy", "uniqueness"}));
    ns->add_flag("--exact", cfg.exact, "solve in exact rational arithmetic");
    ns->add_option("--dump", cfg.dump_path, "write the LP in plain-text matrix form");
    ns->add_option("--eps", cfg.eps, "epsilon grid for theorem1")->delimiter(',');
    ns->add_option("--party", cfg.party, "theorem1: excluded party; monogamy: target party (1-based)");
    ns->add_option("--setting", cfg.setting, "inequality basis (1-based settings)")->delimiter(',');
    ns->add_option("--target", cfg.target, "theorem1 target outcomes of the other parties")->delimiter(',');
    ns->add_option("--behavior", cfg.behavior_path, "monogamy: fixed behavior file instead of the ideal box");

    auto* verify = app.add_subcommand("verify", "run the checker battery on a behavior file");
    common(verify, false);
    verify->add_option("--behavior", cfg.behavior_path, "behavior JSON")->required();

    auto* share = app.add_subcommand("share", "simulate the secret-sharing protocol");
    common(share, true);
    share->add_option("--rounds", cfg.rounds, "protocol rounds")->check(CLI::PositiveNumber);
    share->add_option("--seed", cfg.seed, "64-bit seed");
    share->add_option("--source", cfg.source, "quantum, ideal-box or file")
        ->check(CLI::IsMember({"quantum", "ideal-box", "file"}));
    share->add_option("--behavior", cfg.behavior_path, "behavior JSON for --source file");
    share->add_option("--csv", cfg.csv_path, "write per-round CSV");

    auto* asym = app.add_subcommand("asymptotics", "large-M scaling and equality across N");
    common(asym, false);
    asym->add_option("--n-list", cfg.n_list, "parties")->delimiter(',');
    asym->add_option("--d-list", cfg.d_list, "outcomes")->delimiter(',');
    asym->add_option("--m-list", cfg.m_list, "settings")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::map<CLI::App*, std::function<json(const RunConfig&, Checks&)>> handlers = {
        {terms, run_terms},   {quantum, run_quantum}, {bound, run_bound},           {ns, run_ns},
        {verify, run_verify}, {share, run_share},     {asym, run_asymptotics},
    };
    CLI::App* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

    Checks checks;
    json report = {{"schema", kSchema}, {"command", cfg.subcommand}, {"config", to_json(cfg)}};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        report["result"] = handlers.at(chosen)(cfg, checks);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    report["checks"] = checks.items();
    report["pass"] = checks.pass();
    report["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};

    const std::string text = report.dump(2) + "\n";
    try {
        if (cfg.report_path.empty()) {
            out << text;
        } else {
            write_file(cfg.report_path, text);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (!checks.pass()) {
        for (const auto& name : checks.failed()) err << "check failed: " << name << '\n';
        return kExitCheckFailed;
    }
    return kExitOk;
}

}  // namespace svlab::cli
