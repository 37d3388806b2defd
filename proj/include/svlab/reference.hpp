#pragma once

#include <cstdint>
#include <vector>

#include "svlab/classical.hpp"
#include "svlab/quantum.hpp"
#include "svlab/secret_sharing.hpp"

/// Single-threaded reference kernels. They follow the textbook definitions
/// without the lookup tables and chunking of the parallel kernels, and serve as
/// the comparison baseline in the tests and the benchmark.
namespace svlab::reference {

/// Joint probabilities one by one from the explicit amplitude sum.
BehaviorTable quantum_behavior(const QuantumModel& qm, QuantumSupport support);

/// Plain loop over terms and outcome tuples.
double evaluate(const BellFunctional& f, const BehaviorTable& b);

struct EnumerationMinimum {
    long long weight_sum = 0;
    std::uint64_t evaluations = 0;
    std::uint64_t witness_index = 0;
};

/// Walks every local deterministic strategy in lexicographic order (party 1
/// first, setting 1 first) and scores it by summing all term weights.
EnumerationMinimum min_local(const BellFunctional& f);

/// Same for one bipartition: group answers are digits over the group's joint
/// settings, group containing party 1 first.
EnumerationMinimum min_bilocal(const BellFunctional& f, const std::vector<int>& group);

/// Rounds simulated one after another.
ProtocolTranscript run_protocol(const ProtocolConfig& cfg, const BehaviorTable& source);

}  // namespace svlab::reference
