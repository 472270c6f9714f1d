#include "credal/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "credal/errors.hpp"

namespace credal {

std::size_t config_count(std::span<const std::size_t> cards) {
    std::size_t n = 1;
    for (std::size_t c : cards) {
        if (c != 0 && n > std::numeric_limits<std::size_t>::max() / c)
            throw ValidationError("configuration count overflows");
        n *= c;
    }
    return n;
}

std::vector<std::size_t> row_major_strides(std::span<const std::size_t> cards) {
    std::vector<std::size_t> strides(cards.size(), 1);
    for (std::size_t i = cards.size(); i-- > 1;)
        strides[i - 1] = strides[i] * cards[i];
    return strides;
}

std::vector<std::size_t> decode_config(std::size_t index, std::span<const std::size_t> cards) {
    std::vector<std::size_t> values(cards.size(), 0);
    for (std::size_t i = cards.size(); i-- > 0;) {
        values[i] = index % cards[i];
        index /= cards[i];
    }
    return values;
}

std::optional<std::size_t> Variable::label_index(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - labels.begin());
}

// ---------------------------------------------------------------------------------------
// Dag

Dag::Dag(std::size_t node_count, std::vector<std::vector<VarId>> parents)
    : parents_(std::move(parents)), children_(node_count) {
    if (parents_.size() != node_count)
        throw ValidationError("parent list count does not match node count");
    for (VarId v = 0; v < node_count; ++v) {
        const auto& ps = parents_[v];
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (ps[i] >= node_count)
                throw ValidationError("arc references unknown node");
            if (ps[i] == v)
                throw ValidationError("cycle detected: self loop");
            if (std::find(ps.begin(), ps.begin() + static_cast<std::ptrdiff_t>(i), ps[i]) !=
                ps.begin() + static_cast<std::ptrdiff_t>(i))
                throw ValidationError("duplicate parent in parent list");
            children_[ps[i]].push_back(v);
        }
    }

    // Kahn's algorithm, smallest ready node first for a deterministic order.
    std::vector<std::size_t> indegree(node_count);
    for (VarId v = 0; v < node_count; ++v)
        indegree[v] = parents_[v].size();
    std::priority_queue<VarId, std::vector<VarId>, std::greater<>> ready;
    for (VarId v = 0; v < node_count; ++v)
        if (indegree[v] == 0)
            ready.push(v);
    while (!ready.empty()) {
        const VarId v = ready.top();
        ready.pop();
        topo_.push_back(v);
        for (VarId c : children_[v])
            if (--indegree[c] == 0)
                ready.push(c);
    }
    if (topo_.size() != node_count)
        throw ValidationError("cycle detected");
}

bool Dag::has_arc(VarId from, VarId to) const {
    const auto& ps = parents_.at(to);
    return std::find(ps.begin(), ps.end(), from) != ps.end();
}

// ---------------------------------------------------------------------------------------
// CredalNetwork

namespace {

double max_abs_diff(const Distribution& a, const Distribution& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

void clean_row(std::vector<Distribution>& row, const Variable& var, std::size_t config) {
    if (row.empty())
        throw ValidationError("empty vertex list for '" + var.name + "' (configuration " +
                              std::to_string(config) + ")");
    for (auto& p : row) {
        if (p.size() != var.cardinality())
            throw ValidationError("distribution for '" + var.name + "' has " +
                                  std::to_string(p.size()) + " entries, expected " +
                                  std::to_string(var.cardinality()));
        double sum = 0.0;
        for (double x : p) {
            if (!std::isfinite(x))
                throw ValidationError("non-finite entry in distribution for '" + var.name + "'");
            if (x < 0.0)
                throw ValidationError("negative entry in distribution for '" + var.name + "'");
            sum += x;
        }
        if (std::abs(sum - 1.0) > kNormTol) {
            std::ostringstream os;
            os << "distribution for '" << var.name << "' sums to " << sum << ", not 1";
            throw ValidationError(os.str());
        }
        for (double& x : p)
            x /= sum;
    }
    // Compact in place, keeping first occurrences.
    std::size_t kept = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        const auto end = row.begin() + static_cast<std::ptrdiff_t>(kept);
        const bool dup = std::any_of(row.begin(), end, [&](const Distribution& q) {
            return max_abs_diff(row[i], q) <= kDedupTol;
        });
        if (dup)
            continue;
        if (i != kept)
            row[kept] = std::move(row[i]);
        ++kept;
    }
    row.resize(kept);
}

} // namespace

CredalNetwork::CredalNetwork(std::vector<Variable> variables, Dag dag,
                             std::vector<LocalCredalSet> locals)
    : variables_(std::move(variables)), dag_(std::move(dag)), locals_(std::move(locals)) {
    if (variables_.empty())
        throw ValidationError("empty network: no variables");
    if (dag_.size() != variables_.size())
        throw ValidationError("graph size does not match variable count");
    if (locals_.size() != variables_.size())
        throw ValidationError("every node needs exactly one local credal set");

    std::unordered_set<std::string> names;
    for (VarId v = 0; v < variables_.size(); ++v) {
        auto& var = variables_[v];
        var.id = v;
        if (var.cardinality() < 2)
            throw ValidationError("variable '" + var.name + "' needs at least two values");
        if (!names.insert(var.name).second)
            throw ValidationError("duplicate variable name '" + var.name + "'");
        std::unordered_set<std::string> labels(var.labels.begin(), var.labels.end());
        if (labels.size() != var.labels.size())
            throw ValidationError("duplicate value label in variable '" + var.name + "'");
    }

    for (VarId v = 0; v < variables_.size(); ++v) {
        auto& local = locals_[v];
        if (local.node != v)
            throw ValidationError("local credal set out of order for '" + variables_[v].name + "'");
        if (local.rows.size() != parent_config_count(v))
            throw ValidationError("local credal set of '" + variables_[v].name + "' has " +
                                  std::to_string(local.rows.size()) +
                                  " parent configurations, expected " +
                                  std::to_string(parent_config_count(v)));
        for (std::size_t c = 0; c < local.rows.size(); ++c)
            clean_row(local.rows[c], variables_[v], c);
    }
}

std::optional<VarId> CredalNetwork::find(const std::string& name) const {
    for (const auto& v : variables_)
        if (v.name == name)
            return v.id;
    return std::nullopt;
}

std::vector<std::size_t> CredalNetwork::parent_cards(VarId v) const {
    std::vector<std::size_t> cards;
    for (VarId p : dag_.parents(v))
        cards.push_back(cardinality(p));
    return cards;
}

std::size_t CredalNetwork::parent_config_count(VarId v) const {
    auto cards = parent_cards(v);
    return config_count(cards);
}

std::size_t CredalNetwork::parent_config_index(VarId v,
                                               std::span<const std::size_t> parent_values) const {
    const auto& ps = dag_.parents(v);
    std::size_t index = 0;
    for (std::size_t i = 0; i < ps.size(); ++i)
        index = index * cardinality(ps[i]) + parent_values[i];
    return index;
}

std::uint64_t vertex_combination_count(const CredalNetwork& net) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t n = 1;
    for (const auto& local : net.locals())
        for (const auto& row : local.rows) {
            if (n > kMax / row.size())
                return kMax;
            n *= row.size();
        }
    return n;
}

// ---------------------------------------------------------------------------------------
// Factor

Factor::Factor(std::vector<VarId> scope_, std::vector<std::size_t> cards_, std::vector<double> table_)
    : scope(std::move(scope_)), cards(std::move(cards_)), table(std::move(table_)) {
    if (scope.size() != cards.size())
        throw ValidationError("factor scope and cardinality lists differ in length");
    if (table.size() != config_count(cards))
        throw ValidationError("factor table size does not match its scope");
    for (double x : table)
        if (!std::isfinite(x) || x < 0.0)
            throw ValidationError("factor entries must be finite and nonnegative");
}

double Factor::at(std::span<const std::size_t> config) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < cards.size(); ++i)
        index = index * cards[i] + config[i];
    return table.at(index);
}

// ---------------------------------------------------------------------------------------
// Extensive counts, intervals, concatenation

long double ExtensiveCount::value() const {
    long double n = 1.0L;
    for (std::size_t c : per_config)
        n *= static_cast<long double>(c);
    return n;
}

bool ExtensiveCount::exceeds(std::uint64_t limit) const {
    return value() > static_cast<long double>(limit);
}

std::string ExtensiveCount::symbolic() const {
    std::map<std::size_t, std::size_t> powers;
    for (std::size_t c : per_config)
        if (c != 1)
            ++powers[c];
    if (powers.empty())
        return "1";
    std::ostringstream os;
    bool first = true;
    for (auto [base, exp] : powers) {
        if (!first)
            os << " * ";
        first = false;
        os << base;
        if (exp > 1)
            os << '^' << exp;
    }
    return os.str();
}

ExtensiveCount extensive_count(const CredalNetwork& net, VarId node) {
    ExtensiveCount count;
    for (const auto& row : net.local(node).rows)
        count.per_config.push_back(row.size());
    return count;
}

std::vector<Distribution> intervals_to_vertices(std::span<const double> lower,
                                                std::span<const double> upper) {
    const std::size_t n = lower.size();
    if (n == 0 || upper.size() != n)
        throw ValidationError("interval bounds must be nonempty and of equal length");
    if (n > 20)
        throw ValidationError("interval bounds too wide to enumerate (more than 20 values)");
    double lo_sum = 0.0, hi_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw ValidationError("interval bounds must be finite");
        if (lower[i] < 0.0 || upper[i] > 1.0 + kNormTol)
            throw ValidationError("interval bounds must lie in [0, 1]");
        if (lower[i] > upper[i])
            throw ValidationError("interval with lower bound above upper bound");
        lo_sum += lower[i];
        hi_sum += upper[i];
    }
    if (lo_sum > 1.0 + kNormTol || hi_sum < 1.0 - kNormTol)
        throw ValidationError("empty interval polytope: no distribution satisfies the bounds");

    std::vector<Distribution> vertices;
    auto push_unique = [&](Distribution p) {
        for (const auto& q : vertices)
            if (max_abs_diff(p, q) <= kDedupTol)
                return;
        vertices.push_back(std::move(p));
    };

    // Every coordinate except `free` is pinned to one of its bounds; the free one takes
    // up the remaining mass.
    for (std::size_t free = 0; free < n; ++free) {
        const std::size_t patterns = std::size_t{1} << (n - 1);
        for (std::size_t mask = 0; mask < patterns; ++mask) {
            Distribution p(n);
            double pinned = 0.0;
            std::size_t bit = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == free)
                    continue;
                p[i] = (mask >> bit++) & 1U ? upper[i] : lower[i];
                pinned += p[i];
            }
            double rest = 1.0 - pinned;
            if (rest < lower[free] - kNormTol || rest > upper[free] + kNormTol)
                continue;
            p[free] = std::clamp(rest, lower[free], upper[free]);
            double sum = std::accumulate(p.begin(), p.end(), 0.0);
            for (double& x : p)
                x /= sum;
            push_unique(std::move(p));
        }
    }
    if (vertices.empty())
        throw ValidationError("empty interval polytope: no distribution satisfies the bounds");
    return vertices;
}

std::vector<Factor> concat_credal(const CredalNetwork& net, VarId node, std::uint64_t max_extensive) {
    const auto count = extensive_count(net, node);
    if (count.exceeds(max_extensive))
        throw ResourceLimitError("concatenated credal set of '" + net.variable(node).name +
                                     "' exceeds max_extensive",
                                 count.symbolic());

    std::vector<VarId> scope = net.dag().parents(node);
    scope.push_back(node);
    std::vector<std::size_t> cards = net.parent_cards(node);
    cards.push_back(net.cardinality(node));

    const auto& rows = net.local(node).rows;
    const std::size_t card = net.cardinality(node);
    const auto total = static_cast<std::size_t>(count.value());

    std::vector<Factor> out;
    out.reserve(total);
    std::vector<std::size_t> choice(rows.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<double> table(rows.size() * card);
        for (std::size_t c = 0; c < rows.size(); ++c)
            std::copy(rows[c][choice[c]].begin(), rows[c][choice[c]].end(), table.begin() + c * card);
        out.emplace_back(scope, cards, std::move(table));
        // Mixed-radix increment, first configuration most significant.
        for (std::size_t c = rows.size(); c-- > 0;) {
            if (++choice[c] < rows[c].size())
                break;
            choice[c] = 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Extensive transparent-variable transform

std::vector<std::size_t> TransparentBayesNet::decode_choice(VarId original, std::size_t t) const {
    return decode_config(t, counts.at(original).per_config);
}

TransparentBayesNet ccm_transform_extensive(const CredalNetwork& net, std::uint64_t max_extensive) {
    const std::size_t n = net.size();
    TransparentBayesNet out;
    out.original_count = n;
    out.names.resize(2 * n);
    out.cards.resize(2 * n);
    out.counts.resize(n);

    for (VarId v = 0; v < n; ++v) {
        out.counts[v] = extensive_count(net, v);
        if (out.counts[v].exceeds(max_extensive))
            throw ResourceLimitError("extensive credal set of '" + net.variable(v).name +
                                         "' exceeds max_extensive",
                                     out.counts[v].symbolic());
        out.names[v] = net.variable(v).name;
        out.cards[v] = net.cardinality(v);
        out.names[n + v] = net.variable(v).name + "'";
        out.cards[n + v] = static_cast<std::size_t>(out.counts[v].value());
    }

    std::vector<std::vector<VarId>> parents(2 * n);
    for (VarId v = 0; v < n; ++v) {
        parents[v].push_back(n + v);
        for (VarId p : net.dag().parents(v))
            parents[v].push_back(p);
    }
    out.dag = Dag(2 * n, std::move(parents));

    out.cpts.resize(2 * n);
    for (VarId v = 0; v < n; ++v) {
        const VarId t = n + v;
        out.cpts[t] = Factor({t}, {out.cards[t]},
                             std::vector<double>(out.cards[t], 1.0 / static_cast<double>(out.cards[t])));

        std::vector<VarId> scope = out.dag.parents(v);
        scope.push_back(v);
        std::vector<std::size_t> cards;
        for (VarId s : scope)
            cards.push_back(out.cards[s]);
        const std::size_t configs = net.parent_config_count(v);
        const std::size_t card = net.cardinality(v);
        const auto& rows = net.local(v).rows;

        std::vector<double> table(out.cards[t] * configs * card);
        for (std::size_t tv = 0; tv < out.cards[t]; ++tv) {
            auto choice = out.decode_choice(v, tv);
            for (std::size_t c = 0; c < configs; ++c) {
                const auto& p = rows[c][choice[c]];
                std::copy(p.begin(), p.end(), table.begin() + (tv * configs + c) * card);
            }
        }
        out.cpts[v] = Factor(std::move(scope), std::move(cards), std::move(table));
    }
    return out;
}

bool approx_equal(const CredalNetwork& a, const CredalNetwork& b, double tol) {
    if (a.size() != b.size())
        return false;
    for (VarId v = 0; v < a.size(); ++v) {
        if (a.variable(v).name != b.variable(v).name || a.variable(v).labels != b.variable(v).labels)
            return false;
        if (a.dag().parents(v) != b.dag().parents(v))
            return false;
        const auto& ra = a.local(v).rows;
        const auto& rb = b.local(v).rows;
        if (ra.size() != rb.size())
            return false;
        for (std::size_t c = 0; c < ra.size(); ++c) {
            if (ra[c].size() != rb[c].size())
                return false;
            for (std::size_t k = 0; k < ra[c].size(); ++k)
                if (max_abs_diff(ra[c][k], rb[c][k]) > tol)
                    return false;
        }
    }
    return true;
}

} // namespace credal
