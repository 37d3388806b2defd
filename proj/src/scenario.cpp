#include "svlab/scenario.hpp"

#include <sstream>

namespace svlab {

std::uint64_t checked_pow(std::uint64_t base, int exp) {
    constexpr std::uint64_t limit = std::uint64_t{1} << 62;
    std::uint64_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && out > limit / base) {
            throw CapExceeded("integer power overflow: " + std::to_string(base) + "^" +
                              std::to_string(exp));
        }
        out *= base;
    }
    return out;
}

Scenario::Scenario(int n_parties, int n_settings, int n_outcomes, std::uint64_t table_cap)
    : n_(n_parties), m_(n_settings), d_(n_outcomes), cap_(table_cap) {
    if (n_ < 2) throw Error("scenario needs at least 2 parties, got " + std::to_string(n_));
    if (m_ < 2) throw Error("scenario needs at least 2 settings, got " + std::to_string(m_));
    if (d_ < 2) throw Error("scenario needs at least 2 outcomes, got " + std::to_string(d_));
    setting_count_ = checked_pow(static_cast<std::uint64_t>(m_), n_);
    outcome_count_ = checked_pow(static_cast<std::uint64_t>(d_), n_);
    if (setting_count_ > cap_ || outcome_count_ > cap_) {
        throw CapExceeded("scenario " + describe() + " exceeds table cap of " +
                          std::to_string(cap_) + " entries");
    }
}

std::uint64_t Scenario::setting_index(std::span<const int> s) const {
    validate(s);
    std::uint64_t idx = 0;
    for (int v : s) idx = idx * m_ + static_cast<std::uint64_t>(v - 1);
    return idx;
}

std::uint64_t Scenario::outcome_index(std::span<const int> r) const {
    validate_outcomes(r);
    std::uint64_t idx = 0;
    for (int v : r) idx = idx * d_ + static_cast<std::uint64_t>(v);
    return idx;
}

SettingTuple Scenario::setting_tuple(std::uint64_t index) const {
    SettingTuple s(n_);
    for (int k = n_ - 1; k >= 0; --k) {
        s[k] = static_cast<int>(index % m_) + 1;
        index /= m_;
    }
    return s;
}

OutcomeTuple Scenario::outcome_tuple(std::uint64_t index) const {
    OutcomeTuple r(n_);
    for (int k = n_ - 1; k >= 0; --k) {
        r[k] = static_cast<int>(index % d_);
        index /= d_;
    }
    return r;
}

void Scenario::validate(std::span<const int> s) const {
    if (static_cast<int>(s.size()) != n_) {
        throw Error("setting tuple " + format_tuple(s) + " has wrong length for " + describe());
    }
    for (int v : s) {
        if (v < 1 || v > m_) throw Error("setting tuple " + format_tuple(s) + " out of range 1.." + std::to_string(m_));
    }
}

void Scenario::validate_outcomes(std::span<const int> r) const {
    if (static_cast<int>(r.size()) != n_) {
        throw Error("outcome tuple " + format_tuple(r) + " has wrong length for " + describe());
    }
    for (int v : r) {
        if (v < 0 || v >= d_) throw Error("outcome tuple " + format_tuple(r) + " out of range 0.." + std::to_string(d_ - 1));
    }
}

std::string Scenario::describe() const {
    std::ostringstream os;
    os << "(N=" << n_ << ", M=" << m_ << ", d=" << d_ << ")";
    return os.str();
}

std::string format_tuple(std::span<const int> t) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) os << ',';
        os << t[i];
    }
    os << ')';
    return os.str();
}

}  // namespace svlab
