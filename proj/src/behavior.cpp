#include "svlab/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace svlab {

namespace {

void check_row_values(std::span<double> probs, const Tolerances& tol, bool validate) {
    for (double& p : probs) {
        if (std::isnan(p)) throw Error("behavior table contains NaN");
        if (validate && p < -tol.norm) throw Error("behavior table has negative probability " + std::to_string(p));
        if (p < 0.0 && p >= -tol.norm) p = 0.0;
    }
}

}  // namespace

BehaviorTable::BehaviorTable(Scenario scenario, std::vector<std::uint64_t> support, bool full_grid,
                             std::vector<double> probs)
    : scenario_(scenario), support_(std::move(support)), full_grid_(full_grid), probs_(std::move(probs)) {}

BehaviorTable BehaviorTable::full_grid(Scenario scenario, std::vector<double> probs, Tolerances tol,
                                       Validation v) {
    const std::uint64_t rows = scenario.setting_count();
    if (rows > scenario.table_cap() / scenario.outcome_count()) {
        throw CapExceeded("full-grid table for " + scenario.describe() + " exceeds cap of " +
                          std::to_string(scenario.table_cap()) + " entries");
    }
    if (probs.size() != rows * scenario.outcome_count()) {
        throw Error("full-grid table for " + scenario.describe() + " needs " +
                    std::to_string(rows * scenario.outcome_count()) + " entries, got " +
                    std::to_string(probs.size()));
    }
    std::vector<std::uint64_t> support(rows);
    std::iota(support.begin(), support.end(), std::uint64_t{0});
    check_row_values(probs, tol, v == Validation::checked);
    BehaviorTable b(scenario, std::move(support), true, std::move(probs));
    if (v == Validation::checked) {
        auto rep = check_normalization(b, tol);
        if (!rep.pass) {
            throw Error("behavior not normalized at setting " + format_tuple(rep.worst_setting) +
                        " (deviation " + std::to_string(rep.max_deviation) + ")");
        }
    }
    return b;
}

BehaviorTable BehaviorTable::sparse(Scenario scenario, std::vector<std::uint64_t> settings,
                                    std::vector<double> probs, Tolerances tol, Validation v) {
    const std::uint64_t oc = scenario.outcome_count();
    if (settings.size() > scenario.table_cap() / oc) {
        throw CapExceeded("sparse table for " + scenario.describe() + " exceeds cap");
    }
    if (probs.size() != settings.size() * oc) {
        throw Error("sparse table size mismatch: " + std::to_string(settings.size()) + " settings, " +
                    std::to_string(probs.size()) + " entries");
    }
    for (auto s : settings) {
        if (s >= scenario.setting_count()) throw Error("setting index out of range");
    }
    std::vector<std::size_t> order(settings.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return settings[a] < settings[b]; });
    std::vector<std::uint64_t> sorted(settings.size());
    std::vector<double> rows(probs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted[i] = settings[order[i]];
        if (i > 0 && sorted[i] == sorted[i - 1]) {
            throw Error("duplicate setting " + format_tuple(scenario.setting_tuple(sorted[i])));
        }
        std::copy_n(probs.begin() + static_cast<std::ptrdiff_t>(order[i] * oc), oc,
                    rows.begin() + static_cast<std::ptrdiff_t>(i * oc));
    }
    check_row_values(rows, tol, v == Validation::checked);
    const bool full = sorted.size() == scenario.setting_count();
    BehaviorTable b(scenario, std::move(sorted), full, std::move(rows));
    if (v == Validation::checked) {
        auto rep = check_normalization(b, tol);
        if (!rep.pass) {
            throw Error("behavior not normalized at setting " + format_tuple(rep.worst_setting) +
                        " (deviation " + std::to_string(rep.max_deviation) + ")");
        }
    }
    return b;
}

BehaviorTable BehaviorTable::uniform(const Scenario& scenario) {
    const double p = 1.0 / static_cast<double>(scenario.outcome_count());
    return full_grid(scenario, std::vector<double>(scenario.setting_count() * scenario.outcome_count(), p));
}

BehaviorTable BehaviorTable::deterministic(const Scenario& scenario,
                                           const std::vector<std::vector<int>>& table) {
    const int n = scenario.parties();
    if (static_cast<int>(table.size()) != n) throw Error("deterministic strategy needs one table per party");
    for (const auto& t : table) {
        if (static_cast<int>(t.size()) != scenario.settings()) throw Error("deterministic strategy table has wrong length");
    }
    const std::uint64_t oc = scenario.outcome_count();
    std::vector<double> probs(scenario.setting_count() * oc, 0.0);
    OutcomeTuple r(n);
    for (std::uint64_t si = 0; si < scenario.setting_count(); ++si) {
        auto s = scenario.setting_tuple(si);
        for (int k = 0; k < n; ++k) r[k] = table[k][s[k] - 1];
        probs[si * oc + scenario.outcome_index(r)] = 1.0;
    }
    return full_grid(scenario, std::move(probs));
}

std::optional<std::size_t> BehaviorTable::position(std::uint64_t setting_index) const {
    if (full_grid_) {
        if (setting_index < support_.size()) return static_cast<std::size_t>(setting_index);
        return std::nullopt;
    }
    auto it = std::lower_bound(support_.begin(), support_.end(), setting_index);
    if (it == support_.end() || *it != setting_index) return std::nullopt;
    return static_cast<std::size_t>(it - support_.begin());
}

bool BehaviorTable::supports(std::uint64_t setting_index) const { return position(setting_index).has_value(); }

bool BehaviorTable::supports(std::span<const int> s) const { return supports(scenario_.setting_index(s)); }

std::span<const double> BehaviorTable::row(std::uint64_t setting_index) const {
    auto pos = position(setting_index);
    if (!pos) {
        throw Error("setting tuple " + format_tuple(scenario_.setting_tuple(setting_index)) +
                    " is not supported by the behavior");
    }
    const std::size_t oc = scenario_.outcome_count();
    return std::span<const double>(probs_).subspan(*pos * oc, oc);
}

std::span<const double> BehaviorTable::row(std::span<const int> s) const { return row(scenario_.setting_index(s)); }

double BehaviorTable::probability(std::span<const int> s, std::span<const int> r) const {
    return row(s)[scenario_.outcome_index(r)];
}

std::vector<double> marginalize(const BehaviorTable& b, std::span<const int> keep, std::span<const int> s) {
    const Scenario& sc = b.scenario();
    const int n = sc.parties();
    const int d = sc.outcomes();
    std::vector<int> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) throw Error("duplicate party in marginal subset");
    for (int k : kept) {
        if (k < 0 || k >= n) throw Error("party index " + std::to_string(k) + " out of range");
    }
    auto row = b.row(s);
    std::vector<double> out(checked_pow(static_cast<std::uint64_t>(d), static_cast<int>(kept.size())), 0.0);
    for (std::uint64_t oi = 0; oi < row.size(); ++oi) {
        if (row[oi] == 0.0) continue;
        auto r = sc.outcome_tuple(oi);
        std::uint64_t idx = 0;
        for (int k : kept) idx = idx * d + static_cast<std::uint64_t>(r[k]);
        out[idx] += row[oi];
    }
    return out;
}

NormalizationReport check_normalization(const BehaviorTable& b, Tolerances tol) {
    NormalizationReport rep;
    const Scenario& sc = b.scenario();
    for (auto si : b.support()) {
        auto row = b.row(si);
        double sum = 0.0;
        for (double p : row) {
            sum += p;
            rep.most_negative = std::min(rep.most_negative, p);
        }
        const double dev = std::abs(sum - 1.0);
        if (rep.worst_setting.empty() || dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.worst_setting = sc.setting_tuple(si);
        }
    }
    rep.pass = rep.max_deviation <= tol.norm && rep.most_negative >= -tol.norm;
    return rep;
}

NonsignalingReport check_nonsignaling(const BehaviorTable& b, Tolerances tol) {
    if (!b.is_full_grid()) {
        throw Error("nonsignaling check needs a full-grid behavior; sparse supports cannot compare all settings of a party");
    }
    const Scenario& sc = b.scenario();
    const int n = sc.parties();
    const int m = sc.settings();
    const int d = sc.outcomes();
    for (double p : b.raw()) {
        if (std::isnan(p)) throw Error("behavior contains NaN");
    }
    NonsignalingReport rep;
    const std::uint64_t others_settings = sc.setting_count() / m;
    const std::uint64_t others_outcomes = sc.outcome_count() / d;
    SettingTuple s(n);
    OutcomeTuple r(n);
    for (int k = 0; k < n; ++k) {
        for (std::uint64_t os = 0; os < others_settings; ++os) {
            // Decode the other parties' settings into s, leaving slot k.
            std::uint64_t rem = os;
            for (int j = n - 1; j >= 0; --j) {
                if (j == k) continue;
                s[j] = static_cast<int>(rem % m) + 1;
                rem /= m;
            }
            std::vector<double> lo(others_outcomes, 2.0), hi(others_outcomes, -1.0);
            for (int x = 1; x <= m; ++x) {
                s[k] = x;
                auto row = b.row(s);
                for (std::uint64_t oo = 0; oo < others_outcomes; ++oo) {
                    std::uint64_t rem2 = oo;
                    for (int j = n - 1; j >= 0; --j) {
                        if (j == k) continue;
                        r[j] = static_cast<int>(rem2 % d);
                        rem2 /= d;
                    }
                    double sum = 0.0;
                    for (int a = 0; a < d; ++a) {
                        r[k] = a;
                        sum += row[sc.outcome_index(r)];
                    }
                    lo[oo] = std::min(lo[oo], sum);
                    hi[oo] = std::max(hi[oo], sum);
                }
            }
            for (std::uint64_t oo = 0; oo < others_outcomes; ++oo) {
                const double v = hi[oo] - lo[oo];
                if (v > rep.max_violation) {
                    rep.max_violation = v;
                    rep.party = k;
                    rep.context = s;
                    rep.context[k] = 0;
                }
            }
        }
    }
    rep.pass = rep.max_violation <= tol.ns;
    return rep;
}

BehaviorTable permute_parties(const BehaviorTable& b, std::span<const int> perm) {
    const Scenario& sc = b.scenario();
    const int n = sc.parties();
    if (static_cast<int>(perm.size()) != n) {
        throw Error("permutation of length " + std::to_string(perm.size()) + " for " + std::to_string(n) + " parties");
    }
    std::vector<int> seen(n, 0);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[p]++) throw Error("invalid party permutation " + format_tuple(perm));
    }
    const std::uint64_t oc = sc.outcome_count();
    std::vector<std::uint64_t> settings;
    std::vector<double> probs(b.raw().size());
    settings.reserve(b.support().size());
    // New outcome index for every old outcome index.
    std::vector<std::uint64_t> out_map(oc);
    OutcomeTuple nr(n);
    for (std::uint64_t oi = 0; oi < oc; ++oi) {
        auto r = sc.outcome_tuple(oi);
        for (int i = 0; i < n; ++i) nr[i] = r[perm[i]];
        out_map[oi] = sc.outcome_index(nr);
    }
    SettingTuple ns(n);
    std::size_t pos = 0;
    for (auto si : b.support()) {
        auto s = sc.setting_tuple(si);
        for (int i = 0; i < n; ++i) ns[i] = s[perm[i]];
        settings.push_back(sc.setting_index(ns));
        auto row = b.row(si);
        for (std::uint64_t oi = 0; oi < oc; ++oi) probs[pos * oc + out_map[oi]] = row[oi];
        ++pos;
    }
    if (b.is_full_grid()) {
        std::vector<double> grid(probs.size());
        for (std::size_t i = 0; i < settings.size(); ++i) {
            std::copy_n(probs.begin() + static_cast<std::ptrdiff_t>(i * oc), oc,
                        grid.begin() + static_cast<std::ptrdiff_t>(settings[i] * oc));
        }
        return BehaviorTable::full_grid(sc, std::move(grid), Tolerances{}, BehaviorTable::Validation::unchecked);
    }
    return BehaviorTable::sparse(sc, std::move(settings), std::move(probs), Tolerances{},
                                 BehaviorTable::Validation::unchecked);
}

nlohmann::json to_json(const BehaviorTable& b) {
    const Scenario& sc = b.scenario();
    nlohmann::json entries = nlohmann::json::array();
    for (auto si : b.support()) {
        auto s = sc.setting_tuple(si);
        auto row = b.row(si);
        for (std::uint64_t oi = 0; oi < row.size(); ++oi) {
            if (row[oi] == 0.0) continue;
            entries.push_back({{"settings", s}, {"outcomes", sc.outcome_tuple(oi)}, {"p", row[oi]}});
        }
    }
    return {{"scenario", {{"n", sc.parties()}, {"m", sc.settings()}, {"d", sc.outcomes()}}},
            {"entries", std::move(entries)}};
}

BehaviorTable behavior_from_json(const nlohmann::json& j, Tolerances tol, BehaviorTable::Validation v) {
    if (!j.contains("scenario") || !j.contains("entries")) throw Error("behavior JSON needs 'scenario' and 'entries'");
    const auto& js = j.at("scenario");
    Scenario sc(js.at("n").get<int>(), js.at("m").get<int>(), js.at("d").get<int>());
    const std::uint64_t oc = sc.outcome_count();
    std::vector<std::uint64_t> settings;
    std::vector<double> probs;
    std::unordered_map<std::uint64_t, std::size_t> rows;
    auto find_row = [&](std::uint64_t si) -> std::size_t {
        auto [it, inserted] = rows.try_emplace(si, settings.size());
        if (inserted) {
            settings.push_back(si);
            probs.resize(probs.size() + oc, 0.0);
        }
        return it->second;
    };
    for (const auto& e : j.at("entries")) {
        auto s = e.at("settings").get<std::vector<int>>();
        auto r = e.at("outcomes").get<std::vector<int>>();
        const double p = e.at("p").get<double>();
        const std::size_t pos = find_row(sc.setting_index(s));
        probs[pos * oc + sc.outcome_index(r)] += p;
    }
    return BehaviorTable::sparse(sc, std::move(settings), std::move(probs), tol, v);
}

std::string party_name(int party) {
    if (party >= 0 && party < 26) return std::string(1, static_cast<char>('A' + party));
    return "P" + std::to_string(party + 1);
}

}  // namespace svlab
