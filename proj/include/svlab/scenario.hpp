#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace svlab {

/// Base class of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a requested computation exceeds a configured size cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

struct Tolerances {
    double norm = 1e-9;
    double ns = 1e-9;
};

/// Hard cap on M^N * d^N entries of a dense behavior table.
inline constexpr std::uint64_t kDefaultTableCap = std::uint64_t{1} << 26;

/// Setting indices are 1-based, outcomes 0-based, everywhere in the public API.
using SettingTuple = std::vector<int>;
using OutcomeTuple = std::vector<int>;

/// (N parties, M settings per party, d outcomes per setting).
class Scenario {
public:
    Scenario(int n_parties, int n_settings, int n_outcomes,
             std::uint64_t table_cap = kDefaultTableCap);

    int parties() const { return n_; }
    int settings() const { return m_; }
    int outcomes() const { return d_; }

    /// M^N.
    std::uint64_t setting_count() const { return setting_count_; }
    /// d^N.
    std::uint64_t outcome_count() const { return outcome_count_; }
    std::uint64_t table_cap() const { return cap_; }

    /// Row-major mixed-radix index, party 1 most significant.
    std::uint64_t setting_index(std::span<const int> s) const;
    std::uint64_t outcome_index(std::span<const int> r) const;
    SettingTuple setting_tuple(std::uint64_t index) const;
    OutcomeTuple outcome_tuple(std::uint64_t index) const;

    void validate(std::span<const int> s) const;
    void validate_outcomes(std::span<const int> r) const;

    bool operator==(const Scenario& o) const { return n_ == o.n_ && m_ == o.m_ && d_ == o.d_; }

    std::string describe() const;

private:
    int n_;
    int m_;
    int d_;
    std::uint64_t cap_;
    std::uint64_t setting_count_;
    std::uint64_t outcome_count_;
};

std::string format_tuple(std::span<const int> t);

/// Integer power with overflow detection; throws CapExceeded past 2^62.
std::uint64_t checked_pow(std::uint64_t base, int exp);

/// Euclidean modulo into [0, m).
constexpr int mod(long long a, int m) {
    long long r = a % m;
    return static_cast<int>(r < 0 ? r + m : r);
}

}  // namespace svlab
