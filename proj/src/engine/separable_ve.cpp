#include <algorithm>
#include <cmath>
#include <limits>

#include "credal/engine.hpp"
#include "credal/errors.hpp"

namespace credal {

namespace {

std::uint64_t saturating_product(std::initializer_list<std::uint64_t> factors) {
    std::uint64_t p = 1;
    for (auto f : factors) {
        if (f != 0 && p > std::numeric_limits<std::uint64_t>::max() / f)
            return std::numeric_limits<std::uint64_t>::max();
        p *= f;
    }
    return p;
}

} // namespace

CredalNetwork apply_terminal_evidence(const CredalNetwork& net, const Query& query) {
    std::vector<LocalCredalSet> locals = net.locals();
    for (auto [v, value] : query.evidence) {
        if (!net.dag().children(v).empty())
            continue;
        for (auto& row : locals[v].rows) {
            std::size_t lo = 0, hi = 0;
            for (std::size_t k = 1; k < row.size(); ++k) {
                if (row[k][value] < row[lo][value])
                    lo = k;
                if (row[k][value] > row[hi][value])
                    hi = k;
            }
            std::vector<Distribution> kept{row[std::min(lo, hi)]};
            if (row[lo][value] != row[hi][value])
                kept.push_back(row[std::max(lo, hi)]);
            row = std::move(kept);
        }
    }
    std::vector<std::vector<VarId>> parents;
    for (VarId v = 0; v < net.size(); ++v)
        parents.push_back(net.dag().parents(v));
    return CredalNetwork(net.variables(), Dag(net.size(), std::move(parents)), std::move(locals));
}

InferenceResult posterior_bounds_from_candidates(std::span<const Factor> candidates, const Query& query,
                                                 double mass_floor) {
    if (candidates.empty())
        throw ValidationError("no candidates for bound extraction");
    InferenceResult result;
    const std::size_t card = candidates.front().table.size();
    for (const auto& f : candidates)
        if (f.table.size() != card || f.scope.size() != 1 || f.scope.front() != query.target)
            throw ValidationError("bound extraction needs factors over the target alone");

    result.bounds.assign(card, {INFINITY, -INFINITY});
    std::size_t used = 0;
    for (const auto& f : candidates) {
        double mass = 0.0;
        for (double x : f.table)
            mass += x;
        if (!(mass > mass_floor)) {
            ++result.diagnostics.massless_skipped;
            continue;
        }
        ++used;
        for (std::size_t v = 0; v < card; ++v) {
            const double p = f.table[v] / mass;
            result.bounds[v].lower = std::min(result.bounds[v].lower, p);
            result.bounds[v].upper = std::max(result.bounds[v].upper, p);
        }
    }
    if (used == 0)
        throw ZeroEvidenceError("every candidate gives the evidence zero probability");
    if (result.diagnostics.massless_skipped)
        result.diagnostics.notes.push_back(std::to_string(result.diagnostics.massless_skipped) +
                                           " massless candidate(s) skipped");
    return result;
}

InferenceResult separable_ve(const CredalNetwork& net, const Query& query, const EngineOptions& opts) {
    auto sub = relevant_subnetwork(net, query);
    const CredalNetwork reduced =
        opts.prune_terminal_evidence ? apply_terminal_evidence(sub.network, sub.query) : sub.network;
    const Query& q = sub.query;

    Diagnostics diag;
    std::vector<SeparableMessage> pool;
    for (VarId v = 0; v < reduced.size(); ++v) {
        auto msg = node_message(reduced, q, v);
        // Slices of a local set are already vertex lists, but clamping an observed node
        // collapses them to scalars where only the extremes matter.
        for (auto& slice : msg.slices) {
            if (slice.size() <= 2)
                continue;
            const std::size_t before = slice.size();
            PointSet points(slice.front().size(), slice);
            auto keep = redundancy_eliminate_indices(points, opts.tol, opts.exec);
            std::vector<std::vector<double>> kept;
            for (std::size_t i : keep)
                kept.push_back(std::move(slice[i]));
            slice = std::move(kept);
            diag.re_removed += before - slice.size();
        }
        pool.push_back(std::move(msg));
    }

    // Greedy order on the messages actually built so far: next is the variable whose bucket
    // writes the fewest table entries over all its output slices. A poor choice can couple a
    // variable that would otherwise stay separable, or fan out one slice per configuration of
    // many separable variables. The graph order only breaks ties.
    std::vector<VarId> remaining = elimination_order(reduced, q);
    while (!remaining.empty()) {
        std::size_t best = 0;
        std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            std::vector<SeparableMessage> bucket;
            for (const auto& m : pool)
                if (m.mentions(remaining[i]))
                    bucket.push_back(m);
            if (bucket.empty()) {
                best = i;
                break;
            }
            const auto cost = bucket_cost(bucket, remaining[i]);
            const std::uint64_t entries = saturating_product({cost.slices, cost.candidates, cost.table_size});
            if (entries < best_cost) {
                best_cost = entries;
                best = i;
            }
        }
        const VarId x = remaining[best];
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));

        std::vector<SeparableMessage> bucket, rest;
        for (auto& m : pool)
            (m.mentions(x) ? bucket : rest).push_back(std::move(m));
        pool = std::move(rest);
        if (bucket.empty())
            continue;
        pool.push_back(eliminate_bucket(bucket, x, opts, &diag));
    }

    const VarId target[] = {q.target};
    auto final_msg = combine_messages(pool, std::nullopt, target, opts, &diag);
    if (final_msg.coupled.size() != 1 || !final_msg.separable.empty())
        throw std::logic_error("final bucket does not reduce to the target");

    std::vector<Factor> candidates;
    for (std::size_t k = 0; k < final_msg.slices.front().size(); ++k)
        candidates.push_back(final_msg.factor(0, k));
    auto result = posterior_bounds_from_candidates(candidates, q, opts.mass_floor);
    diag.merge(result.diagnostics);
    result.diagnostics = std::move(diag);
    result.diagnostics.method = "separable";
    return result;
}

} // namespace credal
