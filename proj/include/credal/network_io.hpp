#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "credal/model.hpp"

namespace credal {

/// Parses and validates a network document:
///
///   { "variables":   [ {"name": "A", "values": ["a0", "a1"]}, ... ],
///     "arcs":        [ ["A", "B"], ... ],
///     "credal_sets": { "B": [ {"parents": ["a0"], "vertices": [[0.5, 0.5], [0.6, 0.4]]},
///                             {"parents": ["a1"], "intervals": {"lower": [...], "upper": [...]}} ] } }
///
/// Parent order for a node is the order its incoming arcs appear in "arcs". Interval rows are
/// converted to vertex lists here; nothing downstream sees intervals.
/// Throws ValidationError naming the offending field.
CredalNetwork load_network(std::string_view document);
CredalNetwork load_network_file(const std::filesystem::path& path);

/// Vertex-list form of the same schema. Doubles are written with round-trip precision.
std::string serialize_network(const CredalNetwork& net);
void write_network_file(const CredalNetwork& net, const std::filesystem::path& path);

} // namespace credal
