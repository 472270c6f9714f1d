#include "credal/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "credal/errors.hpp"

namespace credal {

void validate_query(const CredalNetwork& net, const Query& query) {
    if (query.target >= net.size())
        throw ValidationError("query target out of range");
    for (auto [v, value] : query.evidence) {
        if (v >= net.size())
            throw ValidationError("evidence variable out of range");
        if (value >= net.cardinality(v))
            throw ValidationError("evidence value out of range for '" + net.variable(v).name + "'");
    }
    if (query.observed(query.target))
        throw ValidationError("query target '" + net.variable(query.target).name + "' is in the evidence");
}

std::vector<bool> d_connected_from(const Dag& dag, VarId source, const std::set<VarId>& observed) {
    const std::size_t n = dag.size();
    // Observed nodes and their ancestors: a collider is active iff it lies in this set.
    std::vector<bool> anc(n, false);
    std::deque<VarId> stack(observed.begin(), observed.end());
    while (!stack.empty()) {
        VarId v = stack.back();
        stack.pop_back();
        if (anc[v])
            continue;
        anc[v] = true;
        for (VarId p : dag.parents(v))
            stack.push_back(p);
    }

    enum Dir { up = 0, down = 1 }; // up: arrived from a child; down: arrived from a parent
    std::vector<bool> seen(2 * n, false), reach(n, false);
    std::deque<std::pair<VarId, Dir>> queue{{source, up}};
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        if (seen[2 * v + dir])
            continue;
        seen[2 * v + dir] = true;
        const bool obs = observed.count(v) != 0;
        if (!obs)
            reach[v] = true;
        if (dir == up && !obs) {
            for (VarId p : dag.parents(v))
                queue.emplace_back(p, up);
            for (VarId c : dag.children(v))
                queue.emplace_back(c, down);
        } else if (dir == down) {
            if (!obs)
                for (VarId c : dag.children(v))
                    queue.emplace_back(c, down);
            if (anc[v])
                for (VarId p : dag.parents(v))
                    queue.emplace_back(p, up);
        }
    }
    return reach;
}

bool d_separated(const Dag& dag, VarId a, VarId b, const std::set<VarId>& given) {
    if (a >= dag.size() || b >= dag.size())
        throw ValidationError("d-separation query references an unknown node");
    if (a == b || given.count(a) || given.count(b))
        throw ValidationError("d-separation needs distinct, unobserved endpoints");
    return !d_connected_from(dag, a, given)[b];
}

std::optional<VarId> SubnetworkReport::to_sub(VarId original) const {
    auto it = std::lower_bound(kept.begin(), kept.end(), original);
    if (it == kept.end() || *it != original)
        return std::nullopt;
    return static_cast<VarId>(it - kept.begin());
}

SubnetworkReport relevant_nodes(const CredalNetwork& net, const Query& query) {
    validate_query(net, query);
    const Dag& dag = net.dag();
    const std::size_t n = net.size();
    std::vector<bool> observed(n, false);
    for (const auto& [v, value] : query.evidence)
        observed[v] = true;

    // Bayes ball: `top` marks nodes whose credal sets matter, `bottom` nodes passed downward.
    std::vector<bool> visited(n, false), top(n, false), bottom(n, false);
    std::deque<std::pair<VarId, bool>> queue{{query.target, true}}; // (node, from_child)
    while (!queue.empty()) {
        auto [v, from_child] = queue.front();
        queue.pop_front();
        visited[v] = true;
        const bool obs = observed[v];
        if (from_child) {
            if (obs)
                continue;
            if (!top[v]) {
                top[v] = true;
                for (VarId p : dag.parents(v))
                    queue.emplace_back(p, true);
            }
            if (!bottom[v]) {
                bottom[v] = true;
                for (VarId c : dag.children(v))
                    queue.emplace_back(c, false);
            }
        } else if (obs) {
            if (!top[v]) {
                top[v] = true;
                for (VarId p : dag.parents(v))
                    queue.emplace_back(p, true);
            }
        } else if (!bottom[v]) {
            bottom[v] = true;
            for (VarId c : dag.children(v))
                queue.emplace_back(c, false);
        }
    }

    // Barren: neither the node nor any descendant is the target or observed.
    std::vector<bool> feeds_query(n, false);
    const auto& topo = dag.topological_order();
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const VarId v = *it;
        feeds_query[v] = v == query.target || observed[v];
        for (VarId c : dag.children(v))
            feeds_query[v] = feeds_query[v] || feeds_query[c];
    }

    SubnetworkReport report;
    for (VarId v = 0; v < n; ++v) {
        if (top[v] || (observed[v] && visited[v])) {
            report.kept.push_back(v);
            if (!top[v])
                report.clamped_roots.push_back(v);
        } else {
            report.removed.push_back(v);
            report.reasons[v] = feeds_query[v] ? RemovalReason::d_separated : RemovalReason::barren;
        }
    }
    return report;
}

Subnetwork relevant_subnetwork(const CredalNetwork& net, const Query& query) {
    SubnetworkReport report = relevant_nodes(net, query);
    const Dag& dag = net.dag();
    std::vector<bool> clamped(net.size(), false);
    for (VarId v : report.clamped_roots)
        clamped[v] = true;

    std::vector<Variable> vars;
    std::vector<std::vector<VarId>> parents;
    std::vector<LocalCredalSet> locals;
    for (VarId sub = 0; sub < report.kept.size(); ++sub) {
        const VarId v = report.kept[sub];
        vars.push_back(net.variable(v));
        LocalCredalSet local{sub, {}};
        if (!clamped[v]) {
            std::vector<VarId> ps;
            for (VarId p : dag.parents(v))
                ps.push_back(*report.to_sub(p));
            parents.push_back(std::move(ps));
            local.rows = net.local(v).rows;
        } else {
            parents.emplace_back();
            Distribution point(net.cardinality(v), 0.0);
            point[query.evidence.at(v)] = 1.0;
            local.rows = {{point}};
        }
        locals.push_back(std::move(local));
    }

    Query sub_query;
    sub_query.target = *report.to_sub(query.target);
    for (auto [v, value] : query.evidence)
        if (auto s = report.to_sub(v))
            sub_query.evidence[*s] = value;

    const std::size_t kept = vars.size();
    return {CredalNetwork(std::move(vars), Dag(kept, std::move(parents)), std::move(locals)),
            std::move(sub_query), std::move(report)};
}

bool is_polytree(const Dag& dag) {
    std::vector<VarId> root(dag.size());
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](VarId v) {
        while (root[v] != v)
            v = root[v] = root[root[v]];
        return v;
    };
    for (VarId v = 0; v < dag.size(); ++v)
        for (VarId p : dag.parents(v)) {
            VarId a = find(v), b = find(p);
            if (a == b)
                return false;
            root[a] = b;
        }
    return true;
}

std::vector<VarId> elimination_order(const CredalNetwork& net, const Query& query) {
    const std::size_t n = net.size();
    std::vector<std::set<VarId>> adj(n);
    for (VarId v = 0; v < n; ++v) {
        std::vector<VarId> family{v};
        for (VarId p : net.dag().parents(v))
            family.push_back(p);
        std::erase_if(family, [&](VarId u) { return query.observed(u); });
        for (VarId a : family)
            for (VarId b : family)
                if (a != b)
                    adj[a].insert(b);
    }

    std::vector<bool> done(n, false);
    for (auto [v, _] : query.evidence)
        done[v] = true;
    std::vector<VarId> order;
    std::size_t remaining = 0;
    for (VarId v = 0; v < n; ++v)
        if (!done[v] && v != query.target)
            ++remaining;

    while (order.size() < remaining) {
        VarId best = n;
        std::size_t best_fill = 0;
        for (VarId v = 0; v < n; ++v) {
            if (done[v] || v == query.target)
                continue;
            std::size_t fill = 0;
            for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
                for (auto b = std::next(a); b != adj[v].end(); ++b)
                    if (!adj[*a].count(*b))
                        ++fill;
            if (best == n || fill < best_fill) {
                best = v;
                best_fill = fill;
            }
        }
        for (VarId a : adj[best])
            for (VarId b : adj[best])
                if (a != b)
                    adj[a].insert(b);
        for (VarId a : adj[best])
            adj[a].erase(best);
        adj[best].clear();
        done[best] = true;
        order.push_back(best);
    }
    return order;
}

} // namespace credal
