#include "svlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace svlab {

Rational to_rational(double x) {
    if (!std::isfinite(x)) throw Error("cannot convert non-finite value to rational");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    const double mant = std::frexp(x, &exp);  // x = mant * 2^exp, 0.5 <= |mant| < 1
    const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    using boost::multiprecision::cpp_int;
    cpp_int num = scaled;
    cpp_int den = 1;
    if (exp >= 0) {
        num <<= exp;
    } else {
        den <<= -exp;
    }
    return Rational(num, den);
}

const char* to_string(LpSolution::Status s) {
    switch (s) {
        case LpSolution::Status::optimal: return "optimal";
        case LpSolution::Status::infeasible: return "infeasible";
        case LpSolution::Status::unbounded: return "unbounded";
        case LpSolution::Status::cap_exceeded: return "cap-exceeded";
    }
    return "unknown";
}

void LpProblem::validate() const {
    if (objective.size() != num_vars) throw Error("objective length does not match variable count");
    for (double c : objective) {
        if (!std::isfinite(c)) throw Error("objective has a non-finite coefficient");
    }
    for (const auto& r : rows) {
        if (!std::isfinite(r.rhs)) throw Error("row '" + r.label + "' has a non-finite right-hand side");
        for (const auto& [j, v] : r.coefs) {
            if (j >= num_vars) throw Error("row '" + r.label + "' references missing column " + std::to_string(j));
            if (!std::isfinite(v)) throw Error("row '" + r.label + "' has a non-finite coefficient");
        }
    }
}

std::string LpProblem::dump() const {
    std::ostringstream os;
    os.precision(17);
    os << "# svlab LP: " << (sense == Sense::minimize ? "min" : "max") << " vars " << num_vars << " rows "
       << rows.size() << '\n';
    os << "objective";
    for (std::size_t j = 0; j < num_vars; ++j) {
        if (objective[j] != 0.0) os << ' ' << j << ':' << objective[j];
    }
    os << '\n';
    for (const auto& r : rows) {
        os << (r.kind == RowKind::eq ? "eq" : r.kind == RowKind::le ? "le" : "ge") << ' ' << r.rhs;
        for (const auto& [j, v] : r.coefs) os << ' ' << j << ':' << v;
        if (!r.label.empty()) os << " # " << r.label;
        os << '\n';
    }
    return os.str();
}

namespace {

double to_double(double v) { return v; }
double to_double(const Rational& v) { return v.convert_to<double>(); }

template <class S>
S from_double(double v) {
    if constexpr (std::is_same_v<S, double>) {
        return v;
    } else {
        return to_rational(v);
    }
}

template <class S>
class Tableau {
public:
    Tableau(const LpProblem& p, double tol) : tol_(tol) {
        m_ = p.rows.size();
        n0_ = p.num_vars;
        std::size_t slacks = 0;
        for (const auto& r : p.rows) {
            if (r.kind != LpProblem::RowKind::eq) ++slacks;
        }
        n_ = n0_ + slacks;
        w_ = n_ + m_ + 1;
        t_.assign((m_ + 1) * w_, S(0));
        flip_.assign(m_, 1);
        basis_.resize(m_);
        std::size_t slack = n0_;
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& r = p.rows[i];
            flip_[i] = r.rhs < 0.0 ? -1 : 1;
            for (const auto& [j, v] : r.coefs) at(i, j) += from_double<S>(v * flip_[i]);
            if (r.kind == LpProblem::RowKind::le) at(i, slack++) = S(flip_[i]);
            if (r.kind == LpProblem::RowKind::ge) at(i, slack++) = S(-flip_[i]);
            at(i, n_ + i) = S(1);
            at(i, w_ - 1) = from_double<S>(r.rhs * flip_[i]);
            basis_[i] = n_ + i;
        }
    }

    S& at(std::size_t i, std::size_t j) { return t_[i * w_ + j]; }
    const S& at(std::size_t i, std::size_t j) const { return t_[i * w_ + j]; }
    S& rhs(std::size_t i) { return at(i, w_ - 1); }

    bool negative(const S& v) const {
        if constexpr (std::is_same_v<S, double>) {
            return v < -tol_;
        } else {
            return v < 0;
        }
    }
    bool positive(const S& v) const {
        if constexpr (std::is_same_v<S, double>) {
            return v > tol_;
        } else {
            return v > 0;
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        const S inv = S(1) / at(r, c);
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j < w_; ++j) {
            if (at(r, j) != S(0)) {
                at(r, j) *= inv;
                nz.push_back(j);
            }
        }
        at(r, c) = S(1);
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const S f = at(i, c);
            if (f == S(0)) continue;
            for (std::size_t j : nz) {
                S& v = at(i, j);
                v -= f * at(r, j);
                if constexpr (std::is_same_v<S, double>) {
                    if (std::abs(v) < 1e-14) v = 0.0;
                }
            }
            at(i, c) = S(0);
        }
        basis_[r] = c;
        ++iterations_;
        if constexpr (std::is_same_v<S, double>) {
            min_pivot_ = std::min(min_pivot_, std::abs(1.0 / inv));
        }
    }

    enum class Outcome { optimal, unbounded };

    // Bland's rule over columns [0, limit).
    Outcome run(std::size_t limit, std::size_t max_iterations) {
        for (;;) {
            std::size_t enter = limit;
            for (std::size_t j = 0; j < limit; ++j) {
                if (negative(at(m_, j))) {
                    enter = j;
                    break;
                }
            }
            if (enter == limit) return Outcome::optimal;
            std::size_t leave = m_;
            S best{};
            for (std::size_t i = 0; i < m_; ++i) {
                if (!positive(at(i, enter))) continue;
                const S ratio = at(i, w_ - 1) / at(i, enter);
                bool take = leave == m_;
                if (!take) {
                    if constexpr (std::is_same_v<S, double>) {
                        const double eps = 1e-12 * (1.0 + std::abs(best));
                        take = ratio < best - eps || (std::abs(ratio - best) <= eps && basis_[i] < basis_[leave]);
                    } else {
                        take = ratio < best || (ratio == best && basis_[i] < basis_[leave]);
                    }
                }
                if (take) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) return Outcome::unbounded;
            if (iterations_ >= max_iterations) {
                std::ostringstream os;
                os << "simplex stalled after " << iterations_ << " pivots (rows " << m_ << ", columns " << n_
                   << ", smallest pivot magnitude " << min_pivot_ << ")";
                throw Error(os.str());
            }
            pivot(leave, enter);
        }
    }

    void set_objective(const std::vector<S>& c) {
        // reduced costs c_j - c_B^T B^{-1} A_j over every column, and -z in rhs
        for (std::size_t j = 0; j < w_; ++j) at(m_, j) = j < c.size() ? c[j] : S(0);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t b = basis_[i];
            const S cb = b < c.size() ? c[b] : S(0);
            if (cb == S(0)) continue;
            for (std::size_t j = 0; j < w_; ++j) {
                if (at(i, j) != S(0)) at(m_, j) -= cb * at(i, j);
            }
        }
    }

    std::size_t m_ = 0, n0_ = 0, n_ = 0, w_ = 0;
    std::vector<S> t_;
    std::vector<int> flip_;
    std::vector<std::size_t> basis_;
    std::size_t iterations_ = 0;
    double tol_;
    double min_pivot_ = std::numeric_limits<double>::infinity();
};

template <class S>
LpSolution solve_impl(const LpProblem& p, const SolveOptions& opt) {
    LpSolution sol;
    Tableau<S> tab(p, opt.pivot_tolerance);
    const std::size_t m = tab.m_;
    const std::size_t n = tab.n_;

    // Phase I: minimize the sum of artificials.
    std::vector<S> c1(n + m, S(0));
    for (std::size_t i = 0; i < m; ++i) c1[n + i] = S(1);
    tab.set_objective(c1);
    tab.run(n + m, opt.max_iterations);
    const S infeas = -tab.at(m, tab.w_ - 1);
    double bsum = 0.0;
    for (const auto& r : p.rows) bsum += std::abs(r.rhs);
    if (to_double(infeas) > opt.pivot_tolerance * std::max(1.0, bsum) ||
        (!std::is_same_v<S, double> && infeas != S(0))) {
        sol.status = LpSolution::Status::infeasible;
        sol.iterations = tab.iterations_;
        sol.message = "phase I residual " + std::to_string(to_double(infeas));
        return sol;
    }
    // Drive artificials out of the basis; rows where that is impossible are redundant.
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis_[i] < n) continue;
        std::size_t best = n;
        double mag = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = std::abs(to_double(tab.at(i, j)));
            if (tab.positive(tab.at(i, j)) || tab.negative(tab.at(i, j))) {
                if (v > mag) {
                    mag = v;
                    best = j;
                }
            }
        }
        if (best < n) tab.pivot(i, best);
    }

    // Phase II on the real objective, in minimization form.
    const double sense = p.sense == LpProblem::Sense::minimize ? 1.0 : -1.0;
    std::vector<S> c2(n + m, S(0));
    for (std::size_t j = 0; j < tab.n0_; ++j) c2[j] = from_double<S>(sense * p.objective[j]);
    tab.set_objective(c2);
    if (tab.run(n, opt.max_iterations) == Tableau<S>::Outcome::unbounded) {
        sol.status = LpSolution::Status::unbounded;
        sol.iterations = tab.iterations_;
        return sol;
    }

    sol.status = LpSolution::Status::optimal;
    sol.iterations = tab.iterations_;
    std::vector<S> xs(tab.n0_, S(0));
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis_[i] < tab.n0_) xs[tab.basis_[i]] = tab.at(i, tab.w_ - 1);
    }
    sol.x.resize(tab.n0_);
    for (std::size_t j = 0; j < tab.n0_; ++j) sol.x[j] = to_double(xs[j]);
    // Minimization-form duals in the caller's row orientation.
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = -to_double(tab.at(m, n + i)) * tab.flip_[i];

    if constexpr (!std::is_same_v<S, double>) {
        S obj = 0;
        for (std::size_t j = 0; j < tab.n0_; ++j) {
            if (p.objective[j] != 0.0) obj += from_double<S>(p.objective[j]) * xs[j];
        }
        sol.exact_objective = obj;
    }

    // Residuals recomputed from the original data.
    double cx = 0.0, by = 0.0;
    for (std::size_t j = 0; j < tab.n0_; ++j) {
        cx += sense * p.objective[j] * sol.x[j];
        sol.primal_residual = std::max(sol.primal_residual, -sol.x[j]);
    }
    std::vector<double> reduced(tab.n0_);
    for (std::size_t j = 0; j < tab.n0_; ++j) reduced[j] = sense * p.objective[j];
    for (std::size_t i = 0; i < m; ++i) {
        const auto& r = p.rows[i];
        double ax = 0.0;
        for (const auto& [j, v] : r.coefs) {
            ax += v * sol.x[j];
            reduced[j] -= y[i] * v;
        }
        const double slack = ax - r.rhs;
        by += r.rhs * y[i];
        switch (r.kind) {
            case LpProblem::RowKind::eq:
                sol.primal_residual = std::max(sol.primal_residual, std::abs(slack));
                break;
            case LpProblem::RowKind::le:
                sol.primal_residual = std::max(sol.primal_residual, slack);
                sol.dual_infeasibility = std::max(sol.dual_infeasibility, y[i]);
                sol.complementary_slackness = std::max(sol.complementary_slackness, std::abs(y[i] * slack));
                break;
            case LpProblem::RowKind::ge:
                sol.primal_residual = std::max(sol.primal_residual, -slack);
                sol.dual_infeasibility = std::max(sol.dual_infeasibility, -y[i]);
                sol.complementary_slackness = std::max(sol.complementary_slackness, std::abs(y[i] * slack));
                break;
        }
    }
    for (std::size_t j = 0; j < tab.n0_; ++j) {
        sol.dual_infeasibility = std::max(sol.dual_infeasibility, -reduced[j]);
        sol.complementary_slackness = std::max(sol.complementary_slackness, std::abs(sol.x[j] * reduced[j]));
    }
    sol.duality_gap = std::abs(cx - by);
    sol.objective = sense * cx;
    if (sol.exact_objective) sol.objective = to_double(*sol.exact_objective);
    sol.duals.resize(m);
    for (std::size_t i = 0; i < m; ++i) sol.duals[i] = sense * y[i];
    return sol;
}

}  // namespace

LpSolution solve(const LpProblem& p, const SolveOptions& opt) {
    p.validate();
    if (p.num_vars > opt.column_cap) {
        LpSolution sol;
        sol.status = LpSolution::Status::cap_exceeded;
        sol.message = std::to_string(p.num_vars) + " columns exceed cap " + std::to_string(opt.column_cap);
        return sol;
    }
    if (opt.exact) return solve_impl<Rational>(p, opt);
    return solve_impl<double>(p, opt);
}

}  // namespace svlab
