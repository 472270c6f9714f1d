#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "credal/engine.hpp"
#include "credal/model.hpp"
#include "credal/network_io.hpp"
#include "credal/random_network.hpp"

namespace credal::testing {

inline std::string data_path(const std::string& file) { return std::string(CREDAL_DATA_DIR) + "/" + file; }

inline CredalNetwork figure1() { return load_network_file(data_path("figure1.json")); }

inline VarId id_of(const CredalNetwork& net, const std::string& name) { return net.find(name).value(); }

inline Variable var(VarId id, const std::string& name, std::size_t card) {
    Variable v{id, name, {}};
    for (std::size_t k = 0; k < card; ++k)
        v.labels.push_back(name + std::to_string(k));
    return v;
}

/// Query with up to `max_evidence` random observed nodes distinct from a random target.
inline Query random_query(const CredalNetwork& net, std::mt19937_64& rng, std::size_t max_evidence) {
    Query q;
    q.target = rng() % net.size();
    const std::size_t want = rng() % (max_evidence + 1);
    for (std::size_t attempt = 0; attempt < 8 && q.evidence.size() < want; ++attempt) {
        const VarId v = rng() % net.size();
        if (v != q.target)
            q.evidence[v] = rng() % net.cardinality(v);
    }
    return q;
}

inline double max_bound_gap(const InferenceResult& a, const InferenceResult& b) {
    double gap = 0.0;
    for (std::size_t k = 0; k < a.bounds.size(); ++k) {
        gap = std::max(gap, std::abs(a.bounds[k].lower - b.bounds[k].lower));
        gap = std::max(gap, std::abs(a.bounds[k].upper - b.bounds[k].upper));
    }
    return a.bounds.size() == b.bounds.size() ? gap : INFINITY;
}

inline EngineOptions serial_options() {
    EngineOptions o;
    o.exec = Execution::serial;
    return o;
}

} // namespace credal::testing

namespace credal::testing {

/// Independent ground truth on the full network: every vertex combination, every joint
/// configuration, no graph reduction. Only for tiny networks.
inline std::vector<Bounds> brute_force_bounds(const CredalNetwork& net, const Query& q) {
    const std::size_t n = net.size();
    std::vector<std::size_t> radix;
    std::vector<std::pair<VarId, std::size_t>> slot;
    for (VarId v = 0; v < n; ++v)
        for (std::size_t c = 0; c < net.local(v).rows.size(); ++c) {
            radix.push_back(net.local(v).rows[c].size());
            slot.emplace_back(v, c);
        }
    std::vector<std::size_t> cards;
    for (VarId v = 0; v < n; ++v)
        cards.push_back(net.cardinality(v));
    const std::size_t joints = config_count(cards);
    std::vector<std::size_t> first(n);
    for (std::size_t s = 0; s < slot.size(); ++s)
        if (slot[s].second == 0)
            first[slot[s].first] = s;

    // Per consistent joint: the slot and entry each node reads, then the target value.
    std::vector<std::size_t> lookup;
    std::vector<std::size_t> target_value;
    for (std::size_t j = 0; j < joints; ++j) {
        const auto x = decode_config(j, cards);
        bool consistent = true;
        for (auto [v, value] : q.evidence)
            consistent = consistent && x[v] == value;
        if (!consistent)
            continue;
        for (VarId v = 0; v < n; ++v) {
            std::vector<std::size_t> pv;
            for (VarId par : net.dag().parents(v))
                pv.push_back(x[par]);
            lookup.push_back(first[v] + net.parent_config_index(v, pv));
            lookup.push_back(x[v]);
        }
        target_value.push_back(x[q.target]);
    }

    const std::size_t card = net.cardinality(q.target);
    std::vector<Bounds> out(card, {INFINITY, -INFINITY});
    std::vector<std::size_t> choice(radix.size(), 0);
    std::vector<const Distribution*> chosen(slot.size());
    while (true) {
        for (std::size_t s = 0; s < slot.size(); ++s)
            chosen[s] = &net.local(slot[s].first).rows[slot[s].second][choice[s]];
        std::vector<double> mass(card, 0.0);
        for (std::size_t j = 0; j < target_value.size(); ++j) {
            double p = 1.0;
            for (VarId v = 0; v < n; ++v)
                p *= (*chosen[lookup[2 * (j * n + v)]])[lookup[2 * (j * n + v) + 1]];
            mass[target_value[j]] += p;
        }
        double total = 0.0;
        for (double m : mass)
            total += m;
        if (total > 0.0)
            for (std::size_t k = 0; k < card; ++k) {
                out[k].lower = std::min(out[k].lower, mass[k] / total);
                out[k].upper = std::max(out[k].upper, mass[k] / total);
            }
        std::size_t p = radix.size();
        while (p-- > 0) {
            if (++choice[p] < radix[p])
                break;
            choice[p] = 0;
        }
        if (p == static_cast<std::size_t>(-1))
            break;
    }
    return out;
}

} // namespace credal::testing
