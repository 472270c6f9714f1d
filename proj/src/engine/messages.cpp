#include <algorithm>
#include <exception>
#include <limits>
#include <map>
#include <set>

#include "credal/engine.hpp"
#include "credal/errors.hpp"

namespace credal {

namespace {

constexpr std::size_t kReBatch = 4096;
// Bound on doubles materialized for one slice before redundancy elimination.
constexpr std::uint64_t kMaxSliceDoubles = 64'000'000;

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

bool contains(const std::vector<VarId>& sorted, VarId v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

// Output scopes of a bucket. `cards` receives every mentioned variable's cardinality.
SeparableMessage output_scopes(std::span<const SeparableMessage> incoming, std::optional<VarId> elim_var,
                               std::span<const VarId> force_coupled, std::map<VarId, std::size_t>& cards) {
    for (const auto& m : incoming) {
        for (std::size_t i = 0; i < m.coupled.size(); ++i)
            cards[m.coupled[i]] = m.coupled_cards[i];
        for (std::size_t i = 0; i < m.separable.size(); ++i)
            cards[m.separable[i]] = m.separable_cards[i];
    }
    SeparableMessage out;
    for (auto [v, card] : cards) {
        if (elim_var && v == *elim_var)
            continue;
        bool separable = std::find(force_coupled.begin(), force_coupled.end(), v) == force_coupled.end();
        for (const auto& m : incoming) {
            if (!separable)
                break;
            if (contains(m.coupled, v))
                separable = false;
            else if (!contains(m.separable, v) && !m.deterministic())
                separable = false;
        }
        if (separable) {
            out.separable.push_back(v);
            out.separable_cards.push_back(card);
        } else {
            out.coupled.push_back(v);
            out.coupled_cards.push_back(card);
        }
    }
    return out;
}

// Redundancy elimination over a list of equal-length tables; returns the survivors.
std::vector<std::vector<double>> reduce(std::vector<std::vector<double>> tables, double tol, Execution exec) {
    if (tables.size() <= 1)
        return tables;
    PointSet points(tables.front().size(), tables);
    auto keep = redundancy_eliminate_indices(points, tol, exec);
    std::vector<std::vector<double>> out;
    out.reserve(keep.size());
    for (std::size_t i : keep)
        out.push_back(std::move(tables[i]));
    return out;
}

} // namespace

void Diagnostics::merge(const Diagnostics& other) {
    candidates_examined += other.candidates_examined;
    re_removed += other.re_removed;
    max_slice_size = std::max(max_slice_size, other.max_slice_size);
    massless_skipped += other.massless_skipped;
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

bool SeparableMessage::mentions(VarId v) const {
    return contains(coupled, v) || contains(separable, v);
}

bool SeparableMessage::deterministic() const {
    return std::all_of(slices.begin(), slices.end(), [](const auto& s) { return s.size() == 1; });
}

std::size_t SeparableMessage::table_size() const {
    return config_count(coupled_cards);
}

std::uint64_t SeparableMessage::candidate_count() const {
    std::uint64_t n = 1;
    for (const auto& s : slices)
        n = saturating_mul(n, s.size());
    return n;
}

Factor SeparableMessage::factor(std::size_t slice, std::size_t k) const {
    return Factor(coupled, coupled_cards, slices.at(slice).at(k));
}

SeparableMessage node_message(const CredalNetwork& net, const Query& query, VarId node) {
    SeparableMessage msg;
    const bool observed = query.observed(node);
    if (!observed) {
        msg.coupled = {node};
        msg.coupled_cards = {net.cardinality(node)};
    }
    const auto& parents = net.dag().parents(node);
    for (VarId p : parents)
        if (!query.observed(p))
            msg.separable.push_back(p);
    std::sort(msg.separable.begin(), msg.separable.end());
    for (VarId z : msg.separable)
        msg.separable_cards.push_back(net.cardinality(z));

    const std::size_t slices = config_count(msg.separable_cards);
    msg.slices.resize(slices);
    std::vector<std::size_t> parent_values(parents.size());
    for (std::size_t s = 0; s < slices; ++s) {
        auto z = decode_config(s, msg.separable_cards);
        for (std::size_t i = 0; i < parents.size(); ++i) {
            if (query.observed(parents[i])) {
                parent_values[i] = query.evidence.at(parents[i]);
            } else {
                auto pos = std::lower_bound(msg.separable.begin(), msg.separable.end(), parents[i]) -
                           msg.separable.begin();
                parent_values[i] = z[pos];
            }
        }
        const auto& row = net.local(node).rows[net.parent_config_index(node, parent_values)];
        for (const auto& p : row) {
            if (observed)
                msg.slices[s].push_back({p[query.evidence.at(node)]});
            else
                msg.slices[s].push_back(p);
        }
    }
    return msg;
}

SeparableMessage eliminate_bucket(std::span<const SeparableMessage> incoming, VarId elim_var,
                                  const EngineOptions& opts, Diagnostics* diag) {
    for (const auto& m : incoming)
        if (!m.mentions(elim_var))
            throw ValidationError("bucket message does not mention the eliminated variable");
    return combine_messages(incoming, elim_var, {}, opts, diag);
}

BucketCost bucket_cost(std::span<const SeparableMessage> incoming, VarId elim_var) {
    std::map<VarId, std::size_t> cards;
    const SeparableMessage out = output_scopes(incoming, elim_var, {}, cards);
    BucketCost cost{0, out.table_size(), 1};
    for (std::size_t c : out.separable_cards)
        cost.slices = saturating_mul(cost.slices, c);

    // A message contributes one independent choice per configuration of its separable
    // variables that the output slice leaves free; slices of one message may differ in size.
    std::vector<std::vector<std::size_t>> free_cards(incoming.size()), free_strides(incoming.size());
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> fixed(incoming.size());
    std::vector<std::size_t> largest(incoming.size(), 0);
    for (std::size_t j = 0; j < incoming.size(); ++j) {
        const auto& m = incoming[j];
        const auto strides = row_major_strides(m.separable_cards);
        for (std::size_t i = 0; i < m.separable.size(); ++i) {
            auto it = std::lower_bound(out.separable.begin(), out.separable.end(), m.separable[i]);
            if (it != out.separable.end() && *it == m.separable[i]) {
                fixed[j].emplace_back(static_cast<std::size_t>(it - out.separable.begin()), strides[i]);
            } else {
                free_cards[j].push_back(m.separable_cards[i]);
                free_strides[j].push_back(strides[i]);
            }
        }
        for (const auto& slice : m.slices)
            largest[j] = std::max(largest[j], slice.size());
    }

    // Too many slices to inspect: bound each slice by the largest lists.
    constexpr std::uint64_t kExactSlices = 4096;
    if (cost.slices > kExactSlices) {
        cost.candidates = 1;
        for (std::size_t j = 0; j < incoming.size(); ++j) {
            std::uint64_t choices = 1;
            for (std::size_t c : free_cards[j])
                choices = saturating_mul(choices, c);
            for (std::uint64_t k = 0; k < choices && cost.candidates != std::numeric_limits<std::uint64_t>::max(); ++k)
                cost.candidates = saturating_mul(cost.candidates, largest[j]);
        }
        return cost;
    }

    for (std::size_t zs = 0; zs < cost.slices; ++zs) {
        const auto zvals = decode_config(zs, out.separable_cards);
        std::uint64_t total = 1;
        for (std::size_t j = 0; j < incoming.size(); ++j) {
            std::size_t base = 0;
            for (auto [pos, stride] : fixed[j])
                base += zvals[pos] * stride;
            const std::size_t free_configs = config_count(free_cards[j]);
            for (std::size_t f = 0; f < free_configs; ++f) {
                const auto vals = decode_config(f, free_cards[j]);
                std::size_t off = base;
                for (std::size_t i = 0; i < vals.size(); ++i)
                    off += vals[i] * free_strides[j][i];
                total = saturating_mul(total, incoming[j].slices.at(off).size());
            }
        }
        cost.candidates = std::max(cost.candidates, total);
    }
    return cost;
}

SeparableMessage combine_messages(std::span<const SeparableMessage> incoming, std::optional<VarId> elim_var,
                                  std::span<const VarId> force_coupled, const EngineOptions& opts,
                                  Diagnostics* diag) {
    if (incoming.empty())
        throw ValidationError("bucket has no incoming messages");

    std::map<VarId, std::size_t> cards;
    SeparableMessage out = output_scopes(incoming, elim_var, force_coupled, cards);

    // Working scope: coupled output variables, then the summed variable (fastest).
    std::vector<VarId> work = out.coupled;
    std::vector<std::size_t> work_cards = out.coupled_cards;
    std::size_t elim_card = 1;
    if (elim_var) {
        elim_card = cards.at(*elim_var);
        work.push_back(*elim_var);
        work_cards.push_back(elim_card);
    }
    const std::size_t work_size = config_count(work_cards);
    const std::size_t out_size = out.table_size();

    // Per-message lookup tables indexed by working configuration.
    struct Plan {
        std::vector<std::size_t> fixed_pos;   // positions in m.separable fixed by the output slice
        std::vector<std::size_t> fixed_out;   // matching positions in out.separable
        std::vector<std::size_t> slot_offset; // slice offset for each free configuration
        std::vector<std::size_t> slot;        // per working config
        std::vector<std::size_t> entry;       // per working config
        std::vector<std::size_t> strides;     // of m.separable
    };
    std::vector<Plan> plans(incoming.size());
    for (std::size_t j = 0; j < incoming.size(); ++j) {
        const auto& m = incoming[j];
        auto& plan = plans[j];
        plan.strides = row_major_strides(m.separable_cards);
        std::vector<std::size_t> free_pos;
        for (std::size_t i = 0; i < m.separable.size(); ++i) {
            auto it = std::lower_bound(out.separable.begin(), out.separable.end(), m.separable[i]);
            if (it != out.separable.end() && *it == m.separable[i]) {
                plan.fixed_pos.push_back(i);
                plan.fixed_out.push_back(static_cast<std::size_t>(it - out.separable.begin()));
            } else {
                free_pos.push_back(i);
            }
        }
        std::vector<std::size_t> free_cards;
        for (std::size_t i : free_pos)
            free_cards.push_back(m.separable_cards[i]);
        const std::size_t free_configs = config_count(free_cards);
        for (std::size_t f = 0; f < free_configs; ++f) {
            auto vals = decode_config(f, free_cards);
            std::size_t off = 0;
            for (std::size_t i = 0; i < free_pos.size(); ++i)
                off += vals[i] * plan.strides[free_pos[i]];
            plan.slot_offset.push_back(off);
        }

        auto work_pos = [&](VarId v) {
            return static_cast<std::size_t>(std::find(work.begin(), work.end(), v) - work.begin());
        };
        std::vector<std::size_t> free_work, coupled_work;
        for (std::size_t i : free_pos)
            free_work.push_back(work_pos(m.separable[i]));
        for (VarId v : m.coupled)
            coupled_work.push_back(work_pos(v));

        plan.slot.resize(work_size);
        plan.entry.resize(work_size);
        for (std::size_t w = 0; w < work_size; ++w) {
            auto vals = decode_config(w, work_cards);
            std::size_t s = 0, e = 0;
            for (std::size_t i = 0; i < free_work.size(); ++i)
                s = s * free_cards[i] + vals[free_work[i]];
            for (std::size_t i = 0; i < coupled_work.size(); ++i)
                e = e * m.coupled_cards[i] + vals[coupled_work[i]];
            plan.slot[w] = s;
            plan.entry[w] = e;
        }
    }

    const std::size_t out_slices = config_count(out.separable_cards);
    out.slices.resize(out_slices);
    std::vector<Diagnostics> slice_diag(out_slices);
    std::vector<std::exception_ptr> errors(out_slices);

    auto build_slice = [&](std::size_t zs, Diagnostics& d) {
        auto zvals = decode_config(zs, out.separable_cards);

        // Candidate lists per (message, free slot).
        std::vector<std::vector<const std::vector<std::vector<double>>*>> lists(incoming.size());
        std::uint64_t total = 1;
        for (std::size_t j = 0; j < incoming.size(); ++j) {
            const auto& plan = plans[j];
            std::size_t base = 0;
            for (std::size_t i = 0; i < plan.fixed_pos.size(); ++i)
                base += zvals[plan.fixed_out[i]] * plan.strides[plan.fixed_pos[i]];
            for (std::size_t off : plan.slot_offset) {
                const auto* list = &incoming[j].slices.at(base + off);
                lists[j].push_back(list);
                total = saturating_mul(total, list->size());
            }
        }
        if (total > opts.max_candidates)
            throw ResourceLimitError("bucket slice candidate count exceeds max_candidates",
                                     total == std::numeric_limits<std::uint64_t>::max() ? std::string("> 2^64")
                                                                                         : std::to_string(total));
        if (std::min<std::uint64_t>(total, kReBatch) * out_size > kMaxSliceDoubles)
            throw ResourceLimitError("bucket slice tables too large to materialize",
                                     std::to_string(total) + " x " + std::to_string(out_size));

        // Mixed-radix counter over every (message, slot) choice.
        std::vector<std::size_t> choice;
        std::vector<std::size_t> radix;
        for (const auto& lj : lists)
            for (const auto* l : lj) {
                choice.push_back(0);
                radix.push_back(l->size());
            }
        std::vector<std::vector<const double*>> ptr(incoming.size());
        for (std::size_t j = 0; j < incoming.size(); ++j)
            ptr[j].resize(lists[j].size());

        std::vector<std::vector<double>> survivors, pending;
        for (std::uint64_t k = 0; k < total; ++k) {
            std::size_t pos = 0;
            for (std::size_t j = 0; j < incoming.size(); ++j)
                for (std::size_t s = 0; s < lists[j].size(); ++s)
                    ptr[j][s] = (*lists[j][s])[choice[pos++]].data();

            std::vector<double> table(out_size, 0.0);
            for (std::size_t w = 0; w < work_size; ++w) {
                double prod = 1.0;
                for (std::size_t j = 0; j < incoming.size() && prod != 0.0; ++j)
                    prod *= ptr[j][plans[j].slot[w]][plans[j].entry[w]];
                table[w / elim_card] += prod;
            }
            pending.push_back(std::move(table));

            if (pending.size() >= kReBatch) {
                survivors.insert(survivors.end(), std::make_move_iterator(pending.begin()),
                                 std::make_move_iterator(pending.end()));
                pending.clear();
                survivors = reduce(std::move(survivors), opts.tol, opts.exec);
            }
            for (std::size_t p = choice.size(); p-- > 0;) {
                if (++choice[p] < radix[p])
                    break;
                choice[p] = 0;
            }
        }
        survivors.insert(survivors.end(), std::make_move_iterator(pending.begin()),
                         std::make_move_iterator(pending.end()));
        survivors = reduce(std::move(survivors), opts.tol, opts.exec);

        d.candidates_examined += total;
        d.re_removed += total - survivors.size();
        d.max_slice_size = std::max(d.max_slice_size, out_size);
        out.slices[zs] = std::move(survivors);
    };

    const bool parallel = opts.exec == Execution::parallel && out_slices > 1;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::size_t zs = 0; zs < out_slices; ++zs) {
        try {
            build_slice(zs, slice_diag[zs]);
        } catch (...) {
            errors[zs] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    if (diag)
        for (const auto& d : slice_diag)
            diag->merge(d);
    return out;
}

} // namespace credal
