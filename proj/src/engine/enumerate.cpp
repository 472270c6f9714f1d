#include <algorithm>
#include <cmath>
#include <limits>

#include "credal/engine.hpp"
#include "credal/errors.hpp"

namespace credal {

namespace {

constexpr std::size_t kMaxJointConfigs = std::size_t{1} << 22;

// One (node, parent configuration) vertex list.
struct Slot {
    const std::vector<Distribution>* row;
};

struct Partial {
    std::vector<double> lo, hi;
    std::uint64_t massless = 0;
};

} // namespace

InferenceResult enumerate_strong_extension(const CredalNetwork& full, const Query& query,
                                           const EngineOptions& opts) {
    auto sub = relevant_subnetwork(full, query);
    const CredalNetwork& net = sub.network;
    const Query& q = sub.query;
    const std::size_t n = net.size();

    std::vector<Slot> slots;
    std::vector<std::size_t> slot_base(n);
    ExtensiveCount count;
    for (VarId v = 0; v < n; ++v) {
        slot_base[v] = slots.size();
        for (const auto& row : net.local(v).rows) {
            slots.push_back({&row});
            count.per_config.push_back(row.size());
        }
    }
    if (count.exceeds(opts.max_oracle))
        throw ResourceLimitError("vertex combination count exceeds max_oracle", count.symbolic());
    const auto total = static_cast<std::uint64_t>(count.value());

    // Joint configurations consistent with the evidence.
    std::vector<VarId> free_vars;
    std::vector<std::size_t> free_cards;
    for (VarId v = 0; v < n; ++v)
        if (!q.observed(v)) {
            free_vars.push_back(v);
            free_cards.push_back(net.cardinality(v));
        }
    const std::size_t joints = config_count(free_cards);
    if (joints > kMaxJointConfigs)
        throw ResourceLimitError("joint configuration count too large for enumeration", std::to_string(joints));

    // For joint j and node v: which slot and which entry of the chosen vertex.
    std::vector<std::size_t> slot_of(joints * n), value_of(joints * n), target_value(joints);
    {
        std::vector<std::size_t> x(n);
        for (auto [v, value] : q.evidence)
            x[v] = value;
        std::vector<std::size_t> pv;
        for (std::size_t j = 0; j < joints; ++j) {
            auto vals = decode_config(j, free_cards);
            for (std::size_t i = 0; i < free_vars.size(); ++i)
                x[free_vars[i]] = vals[i];
            for (VarId v = 0; v < n; ++v) {
                pv.clear();
                for (VarId p : net.dag().parents(v))
                    pv.push_back(x[p]);
                slot_of[j * n + v] = slot_base[v] + net.parent_config_index(v, pv);
                value_of[j * n + v] = x[v];
            }
            target_value[j] = x[q.target];
        }
    }

    const std::size_t card = net.cardinality(q.target);
    auto evaluate = [&](std::uint64_t begin, std::uint64_t end, Partial& part) {
        std::vector<std::size_t> choice(slots.size());
        std::uint64_t rest = begin;
        for (std::size_t g = slots.size(); g-- > 0;) {
            choice[g] = rest % slots[g].row->size();
            rest /= slots[g].row->size();
        }
        std::vector<const double*> ptr(slots.size());
        std::vector<double> mass(card);
        for (std::uint64_t k = begin; k < end; ++k) {
            for (std::size_t g = 0; g < slots.size(); ++g)
                ptr[g] = (*slots[g].row)[choice[g]].data();
            std::fill(mass.begin(), mass.end(), 0.0);
            for (std::size_t j = 0; j < joints; ++j) {
                double p = 1.0;
                const std::size_t* s = &slot_of[j * n];
                const std::size_t* x = &value_of[j * n];
                for (std::size_t v = 0; v < n && p != 0.0; ++v)
                    p *= ptr[s[v]][x[v]];
                mass[target_value[j]] += p;
            }
            double sum = 0.0;
            for (double m : mass)
                sum += m;
            if (!(sum > opts.mass_floor)) {
                ++part.massless;
            } else {
                for (std::size_t t = 0; t < card; ++t) {
                    const double r = mass[t] / sum;
                    part.lo[t] = std::min(part.lo[t], r);
                    part.hi[t] = std::max(part.hi[t], r);
                }
            }
            for (std::size_t g = slots.size(); g-- > 0;) {
                if (++choice[g] < slots[g].row->size())
                    break;
                choice[g] = 0;
            }
        }
    };

    const std::uint64_t chunk = 1024;
    const std::uint64_t chunks = (total + chunk - 1) / chunk;
    std::vector<Partial> parts(chunks, Partial{std::vector<double>(card, INFINITY),
                                               std::vector<double>(card, -INFINITY), 0});
    const bool parallel = opts.exec == Execution::parallel && chunks > 1;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::uint64_t c = 0; c < chunks; ++c)
        evaluate(c * chunk, std::min(total, (c + 1) * chunk), parts[c]);

    InferenceResult result;
    result.bounds.assign(card, {INFINITY, -INFINITY});
    for (const auto& part : parts) {
        result.diagnostics.massless_skipped += part.massless;
        for (std::size_t t = 0; t < card; ++t) {
            result.bounds[t].lower = std::min(result.bounds[t].lower, part.lo[t]);
            result.bounds[t].upper = std::max(result.bounds[t].upper, part.hi[t]);
        }
    }
    if (result.diagnostics.massless_skipped == total)
        throw ZeroEvidenceError("every vertex combination gives the evidence zero probability");
    result.diagnostics.candidates_examined = total;
    result.diagnostics.method = "enumerate";
    return result;
}

} // namespace credal
