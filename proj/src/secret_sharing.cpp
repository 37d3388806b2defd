#include "svlab/secret_sharing.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "svlab/nonsignaling.hpp"
#include "svlab/quantum.hpp"
#include "svlab/rng.hpp"

namespace svlab {

const char* to_string(SourceKind k) {
    switch (k) {
        case SourceKind::quantum: return "quantum";
        case SourceKind::ideal_box: return "ideal-box";
        case SourceKind::file: return "file";
    }
    return "?";
}

SourceKind source_from_string(const std::string& s) {
    if (s == "quantum") return SourceKind::quantum;
    if (s == "ideal-box") return SourceKind::ideal_box;
    if (s == "file") return SourceKind::file;
    throw Error("unknown source '" + s + "' (expected quantum, ideal-box or file)");
}

void ProtocolConfig::validate() const {
    if (scenario.parties() < 3) throw Error("secret sharing needs N >= 3 (a dealer and two receivers)");
    if (rounds < 1) throw Error("rounds must be at least 1");
    if (source == SourceKind::file) {
        if (!behavior) throw Error("file source selected but no behavior supplied");
        if (!(behavior->scenario() == scenario)) {
            throw Error("behavior scenario " + behavior->scenario().describe() + " does not match " +
                        scenario.describe());
        }
    }
}

BehaviorTable protocol_source(const ProtocolConfig& cfg) {
    cfg.validate();
    switch (cfg.source) {
        case SourceKind::quantum: return quantum_behavior(QuantumModel(cfg.scenario), QuantumSupport::full_grid);
        case SourceKind::ideal_box: return ideal_box(cfg.scenario);
        case SourceKind::file: return *cfg.behavior;
    }
    throw Error("unknown source");
}

RoundResult simulate_round(const BellFunctional& f, const BehaviorTable& source, std::uint64_t seed,
                           std::uint64_t round) {
    const Scenario& sc = source.scenario();
    CounterRng rng(seed, round);
    RoundResult res;
    if (source.is_full_grid()) {
        for (int k = 0; k < sc.parties(); ++k) {
            res.setting_index = res.setting_index * static_cast<std::uint64_t>(sc.settings()) +
                                rng.below(static_cast<std::uint64_t>(sc.settings()));
        }
    } else {
        const auto support = source.support();
        res.setting_index = support[rng.below(support.size())];
    }
    const auto row = source.row(res.setting_index);
    const double u = rng.uniform();
    double acc = 0.0;
    std::uint64_t pick = row.size();
    std::uint64_t last_nonzero = 0;
    for (std::uint64_t i = 0; i < row.size(); ++i) {
        if (row[i] <= 0.0) continue;
        last_nonzero = i;
        acc += row[i];
        if (u < acc) {
            pick = i;
            break;
        }
    }
    // Rounding can leave the cumulative sum just short of u.
    res.outcome_index = pick == row.size() ? last_nonzero : pick;

    if (const ChainedTerm* term = f.term_for(res.setting_index)) {
        res.sifted = true;
        res.reconstructed = term->forced_outcome(0, sc.outcome_tuple(res.outcome_index), sc.outcomes());
    }
    return res;
}

ProtocolTranscript summarize_rounds(const ProtocolConfig& cfg, const BellFunctional& f,
                                    const BehaviorTable& source, const std::vector<RoundResult>& rounds) {
    const Scenario& sc = cfg.scenario;
    const int n = sc.parties();
    const int d = sc.outcomes();
    ProtocolTranscript t;
    t.scenario = sc;
    t.seed = cfg.seed;
    t.source = cfg.source;
    t.settings_restricted = !source.is_full_grid();
    t.rounds = rounds.size();
    t.marginal_counts.assign(n, std::vector<std::uint64_t>(d, 0));
    t.terms.assign(f.terms().size(), {});
    std::vector<double> m2(f.terms().size(), 0.0);

    std::vector<std::size_t> term_pos(sc.setting_count(), f.terms().size());
    for (std::size_t i = 0; i < f.terms().size(); ++i) term_pos[f.terms()[i].setting_index] = i;

    t.setting_index.reserve(rounds.size());
    t.outcome_index.reserve(rounds.size());
    t.sifted.reserve(rounds.size());
    t.reconstructed.reserve(rounds.size());
    for (const auto& r : rounds) {
        t.setting_index.push_back(r.setting_index);
        t.outcome_index.push_back(r.outcome_index);
        t.sifted.push_back(r.sifted ? 1 : 0);
        t.reconstructed.push_back(r.reconstructed);
        if (!r.sifted) continue;
        ++t.sifted_rounds;
        const auto out = sc.outcome_tuple(r.outcome_index);
        if (r.reconstructed != out[0]) ++t.errors;
        for (int k = 0; k < n; ++k) ++t.marginal_counts[k][out[k]];

        const std::size_t ti = term_pos[r.setting_index];
        auto& est = t.terms[ti];
        const double w = f.terms()[ti].weight(out, d);
        ++est.samples;
        const double delta = w - est.mean;
        est.mean += delta / static_cast<double>(est.samples);
        m2[ti] += delta * (w - est.mean);
    }
    t.sift_rate = static_cast<double>(t.sifted_rounds) / static_cast<double>(t.rounds);
    t.error_rate = t.sifted_rounds ? static_cast<double>(t.errors) / static_cast<double>(t.sifted_rounds) : 0.0;

    double sum = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < t.terms.size(); ++i) {
        auto& est = t.terms[i];
        if (est.samples == 0) {
            t.missing_terms.push_back(i);
            continue;
        }
        sum += est.mean;
        if (est.samples > 1) {
            est.variance = m2[i] / static_cast<double>(est.samples - 1);
            var += est.variance / static_cast<double>(est.samples);
        }
    }
    const double reg = f.regularization();
    t.bell_estimate = sum * reg;
    t.bell_standard_error = std::sqrt(var) * reg;
    return t;
}

ProtocolTranscript run_protocol(const ProtocolConfig& cfg) { return run_protocol(cfg, protocol_source(cfg)); }

ProtocolTranscript run_protocol(const ProtocolConfig& cfg, const BehaviorTable& source) {
    cfg.validate();
    if (!(source.scenario() == cfg.scenario)) throw Error("source scenario does not match the configuration");
    const auto f = build_functional(cfg.scenario);
    std::vector<RoundResult> rounds(cfg.rounds);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cfg.rounds); ++i) {
        rounds[static_cast<std::size_t>(i)] = simulate_round(f, source, cfg.seed, static_cast<std::uint64_t>(i));
    }
    return summarize_rounds(cfg, f, source, rounds);
}

std::string ProtocolTranscript::rounds_csv() const {
    std::ostringstream os;
    os << "round,settings,outcomes,sifted,reconstructed,error\n";
    const int n = scenario.parties();
    for (std::size_t i = 0; i < setting_index.size(); ++i) {
        const auto s = scenario.setting_tuple(setting_index[i]);
        const auto r = scenario.outcome_tuple(outcome_index[i]);
        os << i << ',';
        for (int k = 0; k < n; ++k) os << (k ? ";" : "") << s[k];
        os << ',';
        for (int k = 0; k < n; ++k) os << (k ? ";" : "") << r[k];
        os << ',' << int{sifted[i]} << ',' << reconstructed[i] << ','
           << (sifted[i] && reconstructed[i] != r[0] ? 1 : 0) << '\n';
    }
    return os.str();
}

namespace {

UniformityTest uniformity(const ProtocolTranscript& t, std::vector<int> parties) {
    const Scenario& sc = t.scenario;
    const int d = sc.outcomes();
    std::uint64_t cells = 1;
    for (std::size_t i = 0; i < parties.size(); ++i) cells *= static_cast<std::uint64_t>(d);
    std::vector<std::uint64_t> counts(cells, 0);
    for (std::size_t i = 0; i < t.outcome_index.size(); ++i) {
        if (!t.sifted[i]) continue;
        const auto r = sc.outcome_tuple(t.outcome_index[i]);
        std::uint64_t c = 0;
        for (int k : parties) c = c * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(r[k]);
        ++counts[c];
    }
    UniformityTest u;
    u.parties = std::move(parties);
    const double n = static_cast<double>(t.sifted_rounds);
    const double p = 1.0 / static_cast<double>(cells);
    const double expected = n * p;
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    for (auto c : counts) {
        const double f = static_cast<double>(c) / n;
        u.frequencies.push_back(f);
        u.chi_square += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
        u.max_sigma = std::max(u.max_sigma, std::abs(f - p) / sigma);
    }
    u.dof = static_cast<int>(cells) - 1;
    boost::math::chi_squared dist(u.dof);
    u.p_value = boost::math::cdf(boost::math::complement(dist, u.chi_square));
    u.within_3_sigma = u.max_sigma <= 3.0;
    return u;
}

}  // namespace

SecurityReport security_report(const ProtocolTranscript& t) {
    if (t.sifted_rounds < kMinSiftedRounds) {
        throw Error("security report needs at least " + std::to_string(kMinSiftedRounds) + " sifted rounds, got " +
                    std::to_string(t.sifted_rounds));
    }
    const int n = t.scenario.parties();
    SecurityReport rep;
    rep.sifted_rounds = t.sifted_rounds;
    for (int k = 0; k < n; ++k) rep.single_party.push_back(uniformity(t, {k}));
    for (unsigned mask = 1; mask < (1u << n) - 1; ++mask) {
        std::vector<int> parties;
        for (int k = 0; k < n; ++k) {
            if (mask >> k & 1u) parties.push_back(k);
        }
        if (parties.size() >= 2) rep.subsets.push_back(uniformity(t, std::move(parties)));
    }
    rep.bell_estimate = t.bell_estimate;
    rep.bell_standard_error = t.bell_standard_error;
    rep.missing_terms = t.missing_terms.size();
    rep.theorem1_bound = theorem1_bound(t.scenario, std::max(0.0, t.bell_estimate));
    rep.error_rate = t.error_rate;
    for (const auto* group : {&rep.single_party, &rep.subsets}) {
        for (const auto& u : *group) rep.insecure = rep.insecure || u.p_value < kInsecurePValue;
    }
    return rep;
}

nlohmann::json to_json(const ProtocolTranscript& t) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& e : t.terms) terms.push_back({{"samples", e.samples}, {"mean", e.mean}, {"variance", e.variance}});
    return {
        {"scenario", {{"n", t.scenario.parties()}, {"m", t.scenario.settings()}, {"d", t.scenario.outcomes()}}},
        {"seed", t.seed},
        {"source", to_string(t.source)},
        {"settings_restricted_to_support", t.settings_restricted},
        {"rounds", t.rounds},
        {"sifted_rounds", t.sifted_rounds},
        {"sift_rate", t.sift_rate},
        {"errors", t.errors},
        {"error_rate", t.error_rate},
        {"marginal_counts", t.marginal_counts},
        {"bell_estimate", t.bell_estimate},
        {"bell_standard_error", t.bell_standard_error},
        {"missing_terms", t.missing_terms},
        {"terms", terms},
    };
}

nlohmann::json to_json(const SecurityReport& r) {
    auto tests = [](const std::vector<UniformityTest>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& u : v) {
            a.push_back({{"parties", u.parties},
                         {"frequencies", u.frequencies},
                         {"chi_square", u.chi_square},
                         {"dof", u.dof},
                         {"p_value", u.p_value},
                         {"max_sigma", u.max_sigma},
                         {"within_3_sigma", u.within_3_sigma}});
        }
        return a;
    };
    return {
        {"sifted_rounds", r.sifted_rounds},
        {"single_party", tests(r.single_party)},
        {"subsets", tests(r.subsets)},
        {"bell_estimate", r.bell_estimate},
        {"bell_standard_error", r.bell_standard_error},
        {"missing_terms", r.missing_terms},
        {"theorem1_bound_at_estimate", r.theorem1_bound},
        {"error_rate", r.error_rate},
        {"insecure_p_value_threshold", kInsecurePValue},
        {"verdict", r.insecure ? "INSECURE" : "no uniformity violation detected"},
    };
}

}  // namespace svlab
