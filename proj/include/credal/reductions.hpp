#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "credal/engine.hpp"
#include "credal/graph.hpp"
#include "credal/model.hpp"

namespace credal {

/// Does some subset of s sum exactly to l? Requires s nonempty.
struct SubsetSumInstance {
    std::vector<std::uint64_t> s;
    std::uint64_t l = 0;

    std::uint64_t total() const;
    /// Throws ValidationError unless s is nonempty and l is positive.
    void validate() const;
};

/// Largest table (values of a summation node times its parent configurations) the reduction
/// will build.
inline constexpr std::uint64_t kMaxReductionTable = 10'000'000;

/// Polytree whose upper probability of the query event is 1 iff the instance is a yes
/// instance. Nodes X1..Xn carry two point-mass vertices (at 0 and at s_i); Y1..Y(n-1) hold
/// the clipped running sum. Every node has values "0".."total". The query targets Y(n-1), or
/// X1 when n = 1. Requires l <= total.
std::pair<CredalNetwork, Query> subsetsum_to_network(const SubsetSumInstance& inst);

/// Exhaustive check over all 2^n subsets; n <= 25.
bool subsetsum_oracle(const SubsetSumInstance& inst);

/// Upper probability of the reduction's query event, computed by separable_ve.
/// Instances with l above the total are answered 0 without building a network.
double subsetsum_upper(const SubsetSumInstance& inst, const EngineOptions& opts = {});

/// One candidate choice (include[i] selects s_i) checked by a single Bayesian-network
/// propagation: true iff that choice puts probability 1 on the query event.
bool subsetsum_verify_choice(const SubsetSumInstance& inst, const std::vector<bool>& include);

} // namespace credal
