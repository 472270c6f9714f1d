#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "credal/execution.hpp"
#include "credal/geometry.hpp"
#include "credal/graph.hpp"
#include "credal/model.hpp"

namespace credal {

struct EngineOptions {
    /// Convex-combination tolerance for redundancy elimination.
    double tol = kLpTol;
    /// Per-slice candidate cap in eliminate_bucket.
    std::uint64_t max_candidates = 100'000;
    /// Vertex-combination cap for the enumeration oracle.
    std::uint64_t max_oracle = std::uint64_t{1} << 24;
    /// Candidates whose total mass is at or below this are skipped.
    double mass_floor = 1e-300;
    /// Apply terminal-evidence pruning in separable_ve.
    bool prune_terminal_evidence = true;
    Execution exec = Execution::parallel;
};

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

struct Diagnostics {
    std::uint64_t candidates_examined = 0;
    std::uint64_t re_removed = 0;
    /// Longest vector handed to redundancy elimination.
    std::size_t max_slice_size = 0;
    std::uint64_t massless_skipped = 0;
    std::string method;
    std::vector<std::string> notes;

    void merge(const Diagnostics& other);
};

struct InferenceResult {
    /// One entry per value of the target.
    std::vector<Bounds> bounds;
    Diagnostics diagnostics;
};

/// A set of functions f(V | Z) kept separately specified over Z: each configuration of the
/// separable scope owns an independent candidate list of tables over the coupled scope.
/// Both scopes are sorted by variable id; tables and slices are row-major.
struct SeparableMessage {
    std::vector<VarId> coupled;
    std::vector<std::size_t> coupled_cards;
    std::vector<VarId> separable;
    std::vector<std::size_t> separable_cards;
    std::vector<std::vector<std::vector<double>>> slices;

    bool mentions(VarId v) const;
    /// Every slice holds exactly one candidate.
    bool deterministic() const;
    std::size_t table_size() const;
    std::uint64_t candidate_count() const;
    Factor factor(std::size_t slice, std::size_t k) const;
};

/// Initial message for one node's local credal set: coupled scope {node} (empty if observed),
/// separable scope = unobserved parents. Observed values are clamped.
SeparableMessage node_message(const CredalNetwork& net, const Query& query, VarId node);

/// Keeps, for every observed node without children and every parent configuration, only the
/// first vertices attaining the minimum and maximum of p(observed value | configuration).
CredalNetwork apply_terminal_evidence(const CredalNetwork& net, const Query& query);

/// Multiplies the incoming messages, sums out `elim_var` and returns the result kept
/// separable wherever that is exact. A variable stays separable only if no incoming message
/// couples it and every non-deterministic incoming message is separable in it; otherwise one
/// slice's choice would be reused across several output slices. Redundancy elimination runs
/// per output slice.
SeparableMessage eliminate_bucket(std::span<const SeparableMessage> incoming, VarId elim_var,
                                  const EngineOptions& opts = {}, Diagnostics* diag = nullptr);

struct BucketCost {
    /// Largest candidate count of any output slice (saturating).
    std::uint64_t candidates = 0;
    /// Length of each output table.
    std::size_t table_size = 0;
    /// Number of output slices (saturating).
    std::uint64_t slices = 0;
};

/// What eliminate_bucket would enumerate for this bucket, without building anything.
BucketCost bucket_cost(std::span<const SeparableMessage> incoming, VarId elim_var);

/// Same as eliminate_bucket without a summed variable; variables in `coupled` are forced into
/// the coupled scope. Used for the final bucket at the target.
SeparableMessage combine_messages(std::span<const SeparableMessage> incoming, std::optional<VarId> elim_var,
                                  std::span<const VarId> coupled, const EngineOptions& opts = {},
                                  Diagnostics* diag = nullptr);

/// Lower/upper posterior per target value from unnormalized candidates p(target, evidence).
InferenceResult posterior_bounds_from_candidates(std::span<const Factor> candidates, const Query& query,
                                                 double mass_floor = 1e-300);

/// Exact bounds by separable variable elimination with per-slice redundancy elimination.
InferenceResult separable_ve(const CredalNetwork& net, const Query& query, const EngineOptions& opts = {});

/// Ground truth: every combination of one vertex per (node, parent configuration) in the
/// relevant subnetwork, each evaluated as an ordinary Bayesian network.
InferenceResult enumerate_strong_extension(const CredalNetwork& net, const Query& query,
                                           const EngineOptions& opts = {});

/// Interval propagation for binary polytrees: messages along the tree are 2-vectors reduced to
/// their normalized minimum and maximum. Falls back to separable_ve (with a note) when the
/// relevant subnetwork is not a binary polytree.
InferenceResult binary_polytree_bounds(const CredalNetwork& net, const Query& query,
                                       const EngineOptions& opts = {});

/// True when binary_polytree_bounds would take its fast path.
bool binary_polytree_eligible(const CredalNetwork& net, const Query& query);

} // namespace credal
