#include "credal/random_network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "credal/errors.hpp"

namespace credal {

namespace {

// Uniform integer in [lo, hi] without relying on distribution implementations, which differ
// across standard libraries.
std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Distribution random_distribution(std::mt19937_64& rng, std::size_t card) {
    // Weights bounded away from zero, rounded; the last entry takes the remainder.
    std::vector<double> w(card);
    for (auto& x : w)
        x = 0.05 + unit(rng);
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    Distribution d(card);
    double used = 0.0;
    for (std::size_t i = 0; i + 1 < card; ++i) {
        d[i] = std::round(w[i] / sum * 1e6) / 1e6;
        used += d[i];
    }
    d[card - 1] = std::max(0.0, std::round((1.0 - used) * 1e6) / 1e6);
    const double total = std::accumulate(d.begin(), d.end(), 0.0);
    for (auto& x : d)
        x /= total;
    return d;
}

} // namespace

CredalNetwork random_network(const RandomNetworkOptions& opts) {
    if (opts.nodes == 0)
        throw ValidationError("nodes: must be at least 1");
    if (opts.max_vertices == 0)
        throw ValidationError("max-vertices: must be at least 1");
    if (!opts.binary && opts.max_cardinality < 2)
        throw ValidationError("max-cardinality: must be at least 2");

    std::mt19937_64 rng(opts.seed);
    const std::size_t n = opts.nodes;

    std::vector<Variable> vars;
    for (VarId v = 0; v < n; ++v) {
        const std::size_t card = opts.binary ? 2 : draw(rng, 2, opts.max_cardinality);
        Variable var{v, "V" + std::to_string(v), {}};
        for (std::size_t k = 0; k < card; ++k)
            var.labels.push_back("v" + std::to_string(v) + "_" + std::to_string(k));
        vars.push_back(std::move(var));
    }

    // Arcs only go from lower to higher ids, so the graph is acyclic. For polytrees a
    // union-find over the skeleton rejects arcs that would close an undirected cycle.
    std::vector<std::vector<VarId>> parents(n);
    std::vector<VarId> component(n);
    std::iota(component.begin(), component.end(), VarId{0});
    auto root = [&](VarId v) {
        while (component[v] != v)
            v = component[v] = component[component[v]];
        return v;
    };
    for (VarId v = 1; v < n; ++v) {
        const std::size_t want = draw(rng, 0, std::min(opts.max_parents, v));
        for (std::size_t attempt = 0; attempt < 4 * want && parents[v].size() < want; ++attempt) {
            const VarId p = draw(rng, 0, v - 1);
            if (std::find(parents[v].begin(), parents[v].end(), p) != parents[v].end())
                continue;
            if (opts.polytree) {
                if (root(p) == root(v))
                    continue;
                component[root(p)] = root(v);
            }
            parents[v].push_back(p);
        }
    }

    std::vector<LocalCredalSet> locals;
    for (VarId v = 0; v < n; ++v) {
        std::size_t configs = 1;
        for (VarId p : parents[v])
            configs *= vars[p].cardinality();
        LocalCredalSet local{v, {}};
        for (std::size_t c = 0; c < configs; ++c) {
            const std::size_t k = draw(rng, 1, opts.max_vertices);
            std::vector<Distribution> row;
            for (std::size_t i = 0; i < k; ++i)
                row.push_back(random_distribution(rng, vars[v].cardinality()));
            local.rows.push_back(std::move(row));
        }
        locals.push_back(std::move(local));
    }
    return CredalNetwork(std::move(vars), Dag(n, std::move(parents)), std::move(locals));
}

} // namespace credal
