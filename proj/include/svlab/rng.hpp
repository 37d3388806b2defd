#pragma once

#include <cstdint>

namespace svlab {

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// A stream is keyed by (seed, stream id):
///   key = mix(seed ^ mix(stream + G)),  G = 0x9E3779B97F4A7C15
/// and its i-th output (i = 1, 2, ...) is mix(key + i * G). Any stream can be
/// reconstructed without replaying the others, so round r of a simulation uses
/// stream r and the transcript does not depend on how rounds are scheduled.
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + kGolden))) {}

    constexpr std::uint64_t next() {
        ++counter_;
        return mix(key_ + counter_ * kGolden);
    }

    /// 53-bit uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n) by 128-bit multiply-high (bias below n / 2^64).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace svlab
