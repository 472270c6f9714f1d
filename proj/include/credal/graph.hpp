#pragma once

#include <map>
#include <set>
#include <vector>

#include "credal/model.hpp"

namespace credal {

/// Posterior query P(target | evidence). Evidence maps a variable to a value index.
struct Query {
    VarId target = 0;
    std::map<VarId, std::size_t> evidence;

    bool observed(VarId v) const { return evidence.count(v) != 0; }
};

/// Throws ValidationError if the target is observed or any index is out of range.
void validate_query(const CredalNetwork& net, const Query& query);

/// True iff every trail between a and b is blocked by `given` (active-trail semantics).
bool d_separated(const Dag& dag, VarId a, VarId b, const std::set<VarId>& given);

/// Nodes with an active trail from `source` given `observed`, source included.
std::vector<bool> d_connected_from(const Dag& dag, VarId source, const std::set<VarId>& observed);

enum class RemovalReason { barren, d_separated };

struct SubnetworkReport {
    /// Original ids, ascending; the subnetwork id of kept[i] is i.
    std::vector<VarId> kept;
    std::vector<VarId> removed;
    std::map<VarId, RemovalReason> reasons;
    /// Kept observed nodes whose own credal set cannot affect the query. They survive as
    /// parentless nodes holding a point mass on the observed value.
    std::vector<VarId> clamped_roots;

    std::optional<VarId> to_sub(VarId original) const;
};

struct Subnetwork {
    CredalNetwork network;
    Query query;
    SubnetworkReport report;
};

/// The bookkeeping of relevant_subnetwork without building the subnetwork.
SubnetworkReport relevant_nodes(const CredalNetwork& net, const Query& query);

/// Drops barren nodes and nodes d-separated from the target given the evidence, in a single
/// Bayes-ball pass (which reaches the fixpoint of alternating both removals). Every kept node
/// has its parents kept.
Subnetwork relevant_subnetwork(const CredalNetwork& net, const Query& query);

/// True iff the undirected skeleton is a forest.
bool is_polytree(const Dag& dag);

/// Min-fill ordering over the moral graph with observed nodes clamped out. Excludes the
/// target and evidence; ties go to the smallest id.
std::vector<VarId> elimination_order(const CredalNetwork& net, const Query& query);

} // namespace credal
