#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's functional, quantum or LP code; only the data containers are shared.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "svlab/behavior.hpp"

namespace oracle {

inline int md(int a, int d) { return ((a % d) + d) % d; }

/// Two-party chained expression, written out term by term:
///   sum_a <[A_a - B_a]> + <[B_a - A_{a+1}]>,  A_{M+1} = [A_1 + 1].
inline double chained_two_party(const svlab::BehaviorTable& b) {
    const auto& sc = b.scenario();
    const int m = sc.settings();
    const int d = sc.outcomes();
    double total = 0.0;
    for (int a = 1; a <= m; ++a) {
        for (int x = 0; x < d; ++x) {
            for (int y = 0; y < d; ++y) {
                const std::vector<int> r{x, y};
                total += md(x - y, d) * b.probability(std::vector<int>{a, a}, r);
                if (a < m) {
                    total += md(y - x, d) * b.probability(std::vector<int>{a + 1, a}, r);
                } else {
                    total += md(y - (x + 1), d) * b.probability(std::vector<int>{1, a}, r);
                }
            }
        }
    }
    return total;
}

/// Three-party regularized expression:
///   (1/M) sum_{a,b} <[A_a - B_{a+b-1} + C_b]> + <[B_{a+b-1} - A_{a+1} - C_b]>
/// with B_{M+v} = [B_v + 1] and A_{M+1} = [A_1 + 1].
inline double chained_three_party(const svlab::BehaviorTable& b) {
    const auto& sc = b.scenario();
    const int m = sc.settings();
    const int d = sc.outcomes();
    double total = 0.0;
    for (int a = 1; a <= m; ++a) {
        for (int be = 1; be <= m; ++be) {
            int braw = a + be - 1;
            const int boff = braw > m ? 1 : 0;
            const int bset = braw > m ? braw - m : braw;
            const int aset2 = a < m ? a + 1 : 1;
            const int aoff2 = a < m ? 0 : 1;
            for (int x = 0; x < d; ++x) {
                for (int y = 0; y < d; ++y) {
                    for (int z = 0; z < d; ++z) {
                        const std::vector<int> r{x, y, z};
                        total += md(x - (y + boff) + z, d) * b.probability(std::vector<int>{a, bset, be}, r);
                        total += md((y + boff) - (x + aoff2) - z, d) *
                                 b.probability(std::vector<int>{aset2, bset, be}, r);
                    }
                }
            }
        }
    }
    return total / m;
}

/// Eigenvector of party k (0-based) for outcome r at setting e, written from the
/// basis definitions: party 1 phase (e-1/2)/M with +, party 2 phase e/M with -,
/// party k >= 3 phase (e-1)/M with sign (-1)^(k-1) counted 1-based.
inline Eigen::VectorXcd eigenvector(int k, int n_settings, int d, int e, int r) {
    const double pi = std::numbers::pi;
    double phase;
    double sign;
    if (k == 0) {
        phase = (e - 0.5) / n_settings;
        sign = 1.0;
    } else if (k == 1) {
        phase = static_cast<double>(e) / n_settings;
        sign = -1.0;
    } else {
        phase = (e - 1.0) / n_settings;
        sign = k % 2 == 0 ? 1.0 : -1.0;
    }
    Eigen::VectorXcd v(d);
    for (int q = 0; q < d; ++q) {
        v[q] = std::polar(1.0 / std::sqrt(static_cast<double>(d)), sign * 2.0 * pi / d * q * (r - phase));
    }
    return v;
}

/// |<r_1| ... <r_N| GHZ>|^2 from the full d^N state vector.
inline double ghz_probability(int n, int m, int d, const std::vector<int>& s, const std::vector<int>& r) {
    Eigen::VectorXcd product = Eigen::VectorXcd::Ones(1);
    for (int k = 0; k < n; ++k) {
        const Eigen::VectorXcd v = eigenvector(k, m, d, s[k], r[k]);
        Eigen::VectorXcd next(product.size() * d);
        for (Eigen::Index i = 0; i < product.size(); ++i) {
            for (int q = 0; q < d; ++q) next[i * d + q] = product[i] * v[q];
        }
        product = next;
    }
    Eigen::VectorXcd ghz = Eigen::VectorXcd::Zero(product.size());
    Eigen::Index stride = 0;
    for (int k = 0; k < n; ++k) stride = stride * d + 1;  // index of |q q ... q> is q * stride
    for (int q = 0; q < d; ++q) ghz[q * stride] = 1.0 / std::sqrt(static_cast<double>(d));
    return std::norm(product.dot(ghz));  // dot conjugates the left operand
}

inline svlab::BehaviorTable ghz_behavior(int n, int m, int d) {
    svlab::Scenario sc(n, m, d);
    std::vector<double> probs;
    for (std::uint64_t s = 0; s < sc.setting_count(); ++s) {
        const auto st = sc.setting_tuple(s);
        for (std::uint64_t r = 0; r < sc.outcome_count(); ++r) {
            probs.push_back(ghz_probability(n, m, d, st, sc.outcome_tuple(r)));
        }
    }
    return svlab::BehaviorTable::full_grid(sc, probs);
}

/// Largest change of any party-complement marginal when one party switches
/// between any two of its settings.
inline double max_signaling(const svlab::BehaviorTable& b) {
    const auto& sc = b.scenario();
    const int n = sc.parties();
    double worst = 0.0;
    for (std::uint64_t s1 = 0; s1 < sc.setting_count(); ++s1) {
        for (std::uint64_t s2 = 0; s2 < sc.setting_count(); ++s2) {
            const auto a = sc.setting_tuple(s1);
            const auto c = sc.setting_tuple(s2);
            int diff = -1, count = 0;
            for (int k = 0; k < n; ++k) {
                if (a[k] != c[k]) {
                    diff = k;
                    ++count;
                }
            }
            if (count != 1) continue;
            std::vector<double> ma(sc.outcome_count(), 0.0), mc(sc.outcome_count(), 0.0);
            for (std::uint64_t r = 0; r < sc.outcome_count(); ++r) {
                auto rt = sc.outcome_tuple(r);
                rt[diff] = 0;
                const auto key = sc.outcome_index(rt);
                ma[key] += b.row(s1)[r];
                mc[key] += b.row(s2)[r];
            }
            for (std::size_t i = 0; i < ma.size(); ++i) worst = std::max(worst, std::abs(ma[i] - mc[i]));
        }
    }
    return worst;
}

/// Marginal by scanning every outcome tuple.
inline std::vector<double> marginal(const svlab::BehaviorTable& b, const std::vector<int>& keep,
                                    const std::vector<int>& s) {
    const auto& sc = b.scenario();
    const int d = sc.outcomes();
    std::size_t cells = 1;
    for (std::size_t i = 0; i < keep.size(); ++i) cells *= static_cast<std::size_t>(d);
    std::vector<double> out(cells, 0.0);
    const auto row = b.row(s);
    for (std::uint64_t r = 0; r < sc.outcome_count(); ++r) {
        const auto rt = sc.outcome_tuple(r);
        std::size_t idx = 0;
        for (int k : keep) idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(rt[k]);
        out[idx] += row[r];
    }
    return out;
}

/// Closed form of the exact two-party value with these bases:
/// 2M sum_n n P(n), P(n) = sin^2(pi/(2M)) / (d^2 sin^2(pi (n + 1/(2M)) / d)).
inline double two_party_value(int m, int d) {
    const double pi = std::numbers::pi;
    const double delta = 1.0 / (2.0 * m);
    double total = 0.0;
    for (int k = 0; k < d; ++k) {
        const double p = std::pow(std::sin(pi * delta), 2) / (d * d * std::pow(std::sin(pi * (k + delta) / d), 2));
        total += k * p;
    }
    return 2.0 * m * total;
}

}  // namespace oracle
