#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace credal {

using VarId = std::size_t;
using Distribution = std::vector<double>;

/// Sum-to-one tolerance for input distributions.
inline constexpr double kNormTol = 1e-9;
/// Max-norm distance under which two vertices are considered the same point.
inline constexpr double kDedupTol = 1e-12;
inline constexpr std::uint64_t kDefaultMaxExtensive = 1'000'000;

/// Product of cardinalities; throws ValidationError if it does not fit in size_t.
std::size_t config_count(std::span<const std::size_t> cards);

/// Row-major strides: the last entry varies fastest.
std::vector<std::size_t> row_major_strides(std::span<const std::size_t> cards);

/// Inverse of row-major indexing.
std::vector<std::size_t> decode_config(std::size_t index, std::span<const std::size_t> cards);

struct Variable {
    VarId id = 0;
    std::string name;
    std::vector<std::string> labels;

    std::size_t cardinality() const noexcept { return labels.size(); }
    std::optional<std::size_t> label_index(const std::string& label) const;
};

/// Directed acyclic graph with ordered parent lists. Acyclicity is checked on construction.
class Dag {
public:
    Dag() = default;
    Dag(std::size_t node_count, std::vector<std::vector<VarId>> parents);

    std::size_t size() const noexcept { return parents_.size(); }
    const std::vector<VarId>& parents(VarId v) const { return parents_.at(v); }
    const std::vector<VarId>& children(VarId v) const { return children_.at(v); }
    const std::vector<VarId>& topological_order() const noexcept { return topo_; }
    bool has_arc(VarId from, VarId to) const;

private:
    std::vector<std::vector<VarId>> parents_;
    std::vector<std::vector<VarId>> children_;
    std::vector<VarId> topo_;
};

/// Separately specified credal set K(X|Pi): one vertex list per parent configuration,
/// indexed row-major over the parent cardinalities in declared parent order.
struct LocalCredalSet {
    VarId node = 0;
    std::vector<std::vector<Distribution>> rows;

    std::size_t vertex_count(std::size_t config) const { return rows.at(config).size(); }
};

class CredalNetwork {
public:
    CredalNetwork() = default;
    /// Validates every model invariant. Rows with normalization drift up to kNormTol are
    /// renormalized, and vertices closer than kDedupTol are merged (first occurrence kept).
    CredalNetwork(std::vector<Variable> variables, Dag dag, std::vector<LocalCredalSet> locals);

    std::size_t size() const noexcept { return variables_.size(); }
    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const Variable& variable(VarId v) const { return variables_.at(v); }
    std::size_t cardinality(VarId v) const { return variables_.at(v).cardinality(); }
    const Dag& dag() const noexcept { return dag_; }
    const LocalCredalSet& local(VarId v) const { return locals_.at(v); }
    const std::vector<LocalCredalSet>& locals() const noexcept { return locals_; }

    std::optional<VarId> find(const std::string& name) const;
    std::vector<std::size_t> parent_cards(VarId v) const;
    std::size_t parent_config_count(VarId v) const;
    /// Row-major index of a parent configuration given one value per declared parent.
    std::size_t parent_config_index(VarId v, std::span<const std::size_t> parent_values) const;

private:
    std::vector<Variable> variables_;
    Dag dag_;
    std::vector<LocalCredalSet> locals_;
};

/// Counts vertex combinations: the product of all per-(node, configuration) list sizes.
/// Saturates at UINT64_MAX.
std::uint64_t vertex_combination_count(const CredalNetwork& net);

/// Dense nonnegative table over an ordered scope, row-major (last variable fastest).
struct Factor {
    std::vector<VarId> scope;
    std::vector<std::size_t> cards;
    std::vector<double> table;

    Factor() = default;
    Factor(std::vector<VarId> scope, std::vector<std::size_t> cards, std::vector<double> table);

    double at(std::span<const std::size_t> config) const;
};

/// Per-configuration list sizes for the extensive set L(X|Pi), rendered symbolically
/// (e.g. "3^27") when it is too large to enumerate.
struct ExtensiveCount {
    std::vector<std::size_t> per_config;

    long double value() const;
    bool exceeds(std::uint64_t limit) const;
    std::string symbolic() const;
};

ExtensiveCount extensive_count(const CredalNetwork& net, VarId node);

/// Extreme points of {p : lower <= p <= upper, sum p = 1}. Every returned point has all
/// coordinates but at most one at a bound; duplicates are merged within kDedupTol.
std::vector<Distribution> intervals_to_vertices(std::span<const double> lower,
                                                std::span<const double> upper);

/// Definition-4 concatenation: every combination of one vertex per parent configuration,
/// each assembled into a factor g over (parents..., node) with g(x, pi) = p(x|pi).
std::vector<Factor> concat_credal(const CredalNetwork& net, VarId node,
                                  std::uint64_t max_extensive = kDefaultMaxExtensive);

/// Standard Bayesian network produced by the extensive transparent-variable transform.
/// Node i < original_count is an original variable whose first parent is its transparent
/// node original_count + i; transparent nodes are uniform roots.
struct TransparentBayesNet {
    std::size_t original_count = 0;
    std::vector<std::string> names;
    std::vector<std::size_t> cards;
    Dag dag;
    /// cpts[v] has scope (parents of v..., v).
    std::vector<Factor> cpts;
    std::vector<ExtensiveCount> counts;

    VarId transparent_of(VarId original) const { return original_count + original; }
    /// Vertex chosen for each parent configuration of `original` by transparent value t.
    std::vector<std::size_t> decode_choice(VarId original, std::size_t t) const;
};

TransparentBayesNet ccm_transform_extensive(const CredalNetwork& net,
                                            std::uint64_t max_extensive = kDefaultMaxExtensive);

/// Field-wise equality with vertex coordinates compared within tol.
bool approx_equal(const CredalNetwork& a, const CredalNetwork& b, double tol = kDedupTol);

} // namespace credal
