#include "svlab/quantum.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace svlab {

PartyBasisConvention PartyBasisConvention::for_party(int party) {
    PartyBasisConvention c;
    c.phase_sign = party % 2 == 0 ? 1 : -1;
    if (party == 0) {
        c.role = Role::first;
        c.twice_shift = 1;
    } else if (party == 1) {
        c.role = Role::second;
        c.twice_shift = 0;
    } else {
        c.role = Role::later;
        c.twice_shift = 2;
    }
    return c;
}

QuantumModel::QuantumModel(Scenario scenario) : scenario_(scenario) {
    const int n = scenario_.parties();
    for (int k = 0; k < n; ++k) conventions_.push_back(PartyBasisConvention::for_party(k));

    // Every chained term must see the same geometric-sum shape: the term signs
    // agree with the eigenbasis signs up to one global sign, and the basis phases
    // along the term add up to -1/(2M) (J) or +1/(2M) (H). Together these make
    // each term's outcome distribution independent of N.
    const auto f = build_functional(scenario_);
    for (const auto& t : f.terms()) {
        const int rel = t.vars[0].sign * conventions_[0].phase_sign;
        long long phase = 0;
        for (const auto& v : t.vars) {
            const auto& c = conventions_[v.party];
            if (v.sign * c.phase_sign != rel) {
                throw std::logic_error("basis sign convention disagrees with term signs");
            }
            phase += c.phase_sign * (2LL * v.raw_setting - c.twice_shift);
        }
        const long long want = t.kind == TermKind::J ? -1 : 1;
        if (phase != want) throw std::logic_error("basis phase convention breaks the N-independent term shape");
    }
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Per-party integer phase numerator: sign * (2M r - 2e + shift), in units of
// 2 pi / (2 M d) per unit of q.
long long party_phase(const PartyBasisConvention& c, int m, int setting, int outcome) {
    return c.phase_sign * (2LL * m * outcome - c.phase_numerator(setting));
}

double closed_form_from_phase(long long k, int m, int d, double norm) {
    const long long period = 2LL * m * d;
    const long long kd = mod(k, static_cast<int>(period));
    if (kd == 0) return static_cast<double>(d) * d * norm;
    const long long km = mod(k, 2 * m);
    const double num = std::sin(std::numbers::pi * static_cast<double>(km) / (2.0 * m));
    const double den = std::sin(std::numbers::pi * static_cast<double>(kd) / static_cast<double>(period));
    return (num * num) / (den * den) * norm;
}

}  // namespace

double joint_probability_direct(const QuantumModel& qm, std::span<const int> s, std::span<const int> r) {
    const Scenario& sc = qm.scenario();
    sc.validate(s);
    sc.validate_outcomes(r);
    const int n = sc.parties();
    const int m = sc.settings();
    const int d = sc.outcomes();
    const long long period = 2LL * m * d;
    const double coef = 1.0 / std::sqrt(static_cast<double>(d));
    std::complex<double> amp = 0.0;
    for (int q = 0; q < d; ++q) {
        // <r_1| ... <r_N| applied to |q...q>, one conjugated coefficient per party.
        std::complex<double> term = coef;  // GHZ normalization
        for (int k = 0; k < n; ++k) {
            const long long ph = mod(q * party_phase(qm.conventions()[k], m, s[k], r[k]), static_cast<int>(period));
            const double angle = kTwoPi * static_cast<double>(ph) / static_cast<double>(period);
            term *= std::conj(std::polar(coef, angle));
        }
        amp += term;
    }
    return std::norm(amp);
}

double joint_probability(const QuantumModel& qm, std::span<const int> s, std::span<const int> r) {
    const Scenario& sc = qm.scenario();
    sc.validate(s);
    sc.validate_outcomes(r);
    const int m = sc.settings();
    const int d = sc.outcomes();
    long long k = 0;
    for (int p = 0; p < sc.parties(); ++p) k += party_phase(qm.conventions()[p], m, s[p], r[p]);
    const double norm = 1.0 / std::pow(static_cast<double>(d), sc.parties() + 1);
    return closed_form_from_phase(k, m, d, norm);
}

BehaviorTable quantum_behavior(const QuantumModel& qm, QuantumSupport support) {
    const Scenario& sc = qm.scenario();
    const int n = sc.parties();
    const int m = sc.settings();
    const int d = sc.outcomes();
    std::vector<std::uint64_t> settings;
    if (support == QuantumSupport::full_grid) {
        if (sc.setting_count() > sc.table_cap() / sc.outcome_count()) {
            throw CapExceeded("full-grid quantum behavior for " + sc.describe() + " exceeds table cap");
        }
        settings.resize(sc.setting_count());
        for (std::uint64_t i = 0; i < settings.size(); ++i) settings[i] = i;
    } else {
        settings = build_functional(sc).bases();
    }
    const std::uint64_t oc = sc.outcome_count();
    if (settings.size() > sc.table_cap() / oc) throw CapExceeded("quantum behavior exceeds table cap");
    std::vector<double> probs(settings.size() * oc);
    const double norm = 1.0 / std::pow(static_cast<double>(d), n + 1);
    const auto& conv = qm.conventions();

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(settings.size()); ++i) {
        const auto s = sc.setting_tuple(settings[static_cast<std::size_t>(i)]);
        // Phase of the all-zero outcome, then odometer over outcomes.
        long long k = 0;
        for (int p = 0; p < n; ++p) k += party_phase(conv[p], m, s[p], 0);
        std::vector<int> r(n, 0);
        double* row = probs.data() + static_cast<std::size_t>(i) * oc;
        for (std::uint64_t oi = 0; oi < oc; ++oi) {
            row[oi] = closed_form_from_phase(k, m, d, norm);
            for (int p = n - 1; p >= 0; --p) {
                if (++r[p] < d) {
                    k += conv[p].phase_sign * 2LL * m;
                    break;
                }
                r[p] = 0;
                k -= conv[p].phase_sign * 2LL * m * (d - 1);
            }
        }
    }
    if (support == QuantumSupport::full_grid) return BehaviorTable::full_grid(sc, std::move(probs));
    return BehaviorTable::sparse(sc, std::move(settings), std::move(probs));
}

double large_m_approximation(int n_settings, int n_outcomes) {
    const double d = n_outcomes;
    double sum = 0.0;
    for (int i = 1; i < n_outcomes; ++i) {
        const double s = std::sin(std::numbers::pi * i / d);
        sum += i / (s * s);
    }
    return std::numbers::pi * std::numbers::pi / (4.0 * d * d * n_settings) * sum;
}

double quantum_bell_value(int n_parties, int n_settings, int n_outcomes) {
    Scenario sc(n_parties, n_settings, n_outcomes);
    QuantumModel qm(sc);
    return evaluate(build_functional(sc), quantum_behavior(qm, QuantumSupport::inequality_bases));
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("log-log fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable bell_value_vs_m(int n_parties, int n_outcomes, std::span<const int> m_list) {
    ConvergenceTable table;
    table.parties = n_parties;
    table.outcomes = n_outcomes;
    std::vector<double> xs, ys;
    for (int m : m_list) {
        ConvergenceRow row;
        row.m = m;
        row.exact = quantum_bell_value(n_parties, m, n_outcomes);
        row.approximation = large_m_approximation(m, n_outcomes);
        row.ratio = row.exact / row.approximation;
        if (!table.rows.empty() && !(row.exact < table.rows.back().exact)) table.strictly_decreasing = false;
        table.rows.push_back(row);
        xs.push_back(m);
        ys.push_back(row.exact);
    }
    if (xs.size() >= 2) table.loglog_slope = loglog_slope(xs, ys);
    if (!table.rows.empty()) table.fitted_constant = table.rows.back().exact * table.rows.back().m;
    return table;
}

double check_eq9_equality(int n_outcomes, int n_settings, std::span<const int> n_list) {
    const double base = quantum_bell_value(2, n_settings, n_outcomes);
    double worst = 0.0;
    for (int n : n_list) worst = std::max(worst, std::abs(base - quantum_bell_value(n, n_settings, n_outcomes)));
    return worst;
}

}  // namespace svlab
