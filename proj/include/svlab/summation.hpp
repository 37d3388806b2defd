#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace svlab {

/// Kahan-Babuska (Neumaier) compensated accumulator.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline constexpr std::size_t kSumChunk = 256;

/// Sum of fn(0..count-1): fixed-size chunks summed in parallel, chunk results
/// combined in index order. The chunking does not depend on the thread count,
/// so the result is bit-identical for any schedule.
template <class Fn>
double chunked_sum(std::size_t count, Fn&& fn) {
    const std::size_t chunks = (count + kSumChunk - 1) / kSumChunk;
    std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
        NeumaierSum s;
        const std::size_t lo = static_cast<std::size_t>(c) * kSumChunk;
        const std::size_t hi = std::min(count, lo + kSumChunk);
        for (std::size_t i = lo; i < hi; ++i) s.add(fn(i));
        partial[static_cast<std::size_t>(c)] = s.value();
    }
    NeumaierSum total;
    for (double p : partial) total.add(p);
    return total.value();
}

}  // namespace svlab
