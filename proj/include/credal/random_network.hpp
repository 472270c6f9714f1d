#pragma once

#include <cstdint>

#include "credal/model.hpp"

namespace credal {

struct RandomNetworkOptions {
    std::size_t nodes = 6;
    /// Undirected skeleton is a forest.
    bool polytree = false;
    bool binary = false;
    /// Largest cardinality when not binary.
    std::size_t max_cardinality = 3;
    /// Vertices per parent configuration are drawn from 1..max_vertices.
    std::size_t max_vertices = 3;
    std::size_t max_parents = 2;
    std::uint64_t seed = 0;
};

/// Deterministic in the options. Vertices are strictly positive and rounded to six decimals,
/// with the last coordinate absorbing the rounding.
CredalNetwork random_network(const RandomNetworkOptions& opts);

} // namespace credal
