#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "credal/engine.hpp"
#include "credal/errors.hpp"

namespace credal {

namespace {

using Vec2 = std::array<double, 2>;

// The relevant part of the network: kept nodes, with arcs into clamped roots cut.
class Relevant {
public:
    Relevant(const CredalNetwork& net, const SubnetworkReport& report)
        : net_(net), kept_(net.size(), false), clamped_(net.size(), false) {
        for (VarId v : report.kept)
            kept_[v] = true;
        for (VarId v : report.clamped_roots)
            clamped_[v] = true;
    }

    bool kept(VarId v) const { return kept_[v]; }
    bool clamped(VarId v) const { return clamped_[v]; }

    const std::vector<VarId>& parents(VarId v) const {
        static const std::vector<VarId> none;
        return clamped_[v] ? none : net_.dag().parents(v);
    }

    template <typename Fn>
    void for_each_child(VarId v, Fn&& fn) const {
        for (VarId c : net_.dag().children(v))
            if (kept_[c] && !clamped_[c])
                fn(c);
    }

    // Binary variables and a forest skeleton.
    bool binary_polytree() const {
        std::vector<VarId> root(net_.size());
        for (VarId v = 0; v < net_.size(); ++v)
            root[v] = v;
        auto find = [&](VarId v) {
            while (root[v] != v)
                v = root[v] = root[root[v]];
            return v;
        };
        for (VarId v = 0; v < net_.size(); ++v) {
            if (!kept_[v])
                continue;
            if (net_.cardinality(v) != 2)
                return false;
            for (VarId p : parents(v)) {
                const VarId a = find(p), b = find(v);
                if (a == b)
                    return false;
                root[a] = b;
            }
        }
        return true;
    }

private:
    const CredalNetwork& net_;
    std::vector<bool> kept_, clamped_;
};

// Messages along a binary polytree rooted at the target. Every message is a set of
// 2-vectors; because each message multiplies into the joint exactly once, candidates can be
// normalized and only the smallest and largest first coordinate matter.
class Propagator {
public:
    Propagator(const CredalNetwork& net, const Relevant& rel, const Query& query, const EngineOptions& opts,
               Diagnostics& diag)
        : opts_(opts), diag_(diag), rel_(rel), mask_(net.size(), Vec2{1.0, 1.0}), lo_(net.size()),
          hi_(net.size()) {
        for (const auto& [v, value] : query.evidence)
            mask_[v] = value == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
        for (VarId v = 0; v < net.size(); ++v) {
            if (!rel.kept(v))
                continue;
            if (rel.clamped(v)) {
                // Point mass on the observed value.
                const double p0 = mask_[v][0];
                lo_[v] = {p0};
                hi_[v] = {p0};
                continue;
            }
            for (const auto& row : net.local(v).rows) {
                double a = row.front()[0], b = a;
                for (const auto& p : row) {
                    a = std::min(a, p[0]);
                    b = std::max(b, p[0]);
                }
                lo_[v].push_back(a);
                hi_[v].push_back(b);
            }
        }
    }

    // Candidates over x built from everything except the subtree behind `skip_child`.
    std::vector<Vec2> toward_child(VarId x, std::optional<VarId> skip_child) {
        const auto& parents = rel_.parents(x);
        std::vector<std::vector<Vec2>> from_parents;
        for (VarId p : parents)
            from_parents.push_back(toward_child(p, x));
        auto lambdas = child_lambdas(x, skip_child);

        std::vector<Vec2> raw;
        for_each_choice(mask_[x], from_parents, lambdas, [&](const std::vector<const Vec2*>& pi, const Vec2& L) {
            for (const auto* bound : {&lo_[x], &hi_[x]}) {
                double p0 = 0.0, total = 0.0;
                for (std::size_t c = 0; c < bound->size(); ++c) {
                    const double w = weight(c, parents.size(), pi, parents.size());
                    p0 += (*bound)[c] * w;
                    total += w;
                }
                raw.push_back({L[0] * p0, L[1] * (total - p0)});
            }
        });
        return envelope(raw);
    }

    // Candidates over `parent` summarizing x's side of the arc parent -> x.
    std::vector<Vec2> toward_parent(VarId x, VarId parent) {
        const auto& parents = rel_.parents(x);
        const std::size_t skip = static_cast<std::size_t>(std::find(parents.begin(), parents.end(), parent) -
                                                          parents.begin());
        std::vector<std::vector<Vec2>> from_parents;
        for (VarId p : parents)
            from_parents.push_back(p == parent ? std::vector<Vec2>{{1.0, 1.0}} : toward_child(p, x));
        auto lambdas = child_lambdas(x, std::nullopt);

        std::vector<Vec2> raw;
        for_each_choice(mask_[x], from_parents, lambdas, [&](const std::vector<const Vec2*>& pi, const Vec2& L) {
            // For each value of `parent`, every configuration moves the same way as
            // p(x0 | configuration) grows, so the all-lower and all-upper choices suffice.
            for (int pattern = 0; pattern < 4; ++pattern) {
                Vec2 lambda{0.0, 0.0};
                for (std::size_t c = 0; c < lo_[x].size(); ++c) {
                    const std::size_t pv = parent_value(c, parents.size(), skip);
                    const bool upper = (pattern >> pv) & 1;
                    const double p0 = upper ? hi_[x][c] : lo_[x][c];
                    const double w = weight(c, parents.size(), pi, skip);
                    lambda[pv] += w * (p0 * L[0] + (1.0 - p0) * L[1]);
                }
                raw.push_back(lambda);
            }
        });
        return envelope(raw);
    }

private:
    std::vector<std::vector<Vec2>> child_lambdas(VarId x, std::optional<VarId> skip_child) {
        std::vector<std::vector<Vec2>> out;
        rel_.for_each_child(x, [&](VarId c) {
            if (!skip_child || c != *skip_child)
                out.push_back(toward_parent(c, x));
        });
        return out;
    }

    // Value of parent `pos` in row-major parent configuration c.
    static std::size_t parent_value(std::size_t c, std::size_t parent_count, std::size_t pos) {
        return (c >> (parent_count - 1 - pos)) & 1U;
    }

    // Product of the chosen parent messages at configuration c, skipping parent `skip`.
    static double weight(std::size_t c, std::size_t parent_count, const std::vector<const Vec2*>& pi,
                         std::size_t skip) {
        double w = 1.0;
        for (std::size_t i = 0; i < parent_count; ++i)
            if (i != skip)
                w *= (*pi[i])[parent_value(c, parent_count, i)];
        return w;
    }

    // Products of one candidate per child message, times the evidence mask. A child enters
    // every outgoing message only through its ratio c[0] / c[1], and each outgoing bound is
    // monotone in the product of those ratios. With strictly positive candidates the
    // all-lower and all-upper products therefore carry the extremes. With zero entries some
    // products are massless and the ratio argument needs care, so those messages take every
    // combination instead; this is conservative, not known to be required.
    static std::vector<Vec2> combine_lambdas(const Vec2& base, const std::vector<std::vector<Vec2>>& lambdas) {
        const bool positive = std::all_of(lambdas.begin(), lambdas.end(), [](const auto& m) {
            return std::all_of(m.begin(), m.end(), [](const Vec2& c) { return c[0] > 0.0 && c[1] > 0.0; });
        });
        std::vector<Vec2> out{base};
        if (positive) {
            Vec2 upper = base;
            bool split = false;
            for (const auto& m : lambdas) {
                out[0][0] *= m.front()[0];
                out[0][1] *= m.front()[1];
                upper[0] *= m.back()[0];
                upper[1] *= m.back()[1];
                split = split || m.size() > 1;
            }
            if (split)
                out.push_back(upper);
            return out;
        }
        for (const auto& m : lambdas) {
            std::vector<Vec2> next;
            next.reserve(out.size() * m.size());
            for (const auto& l : out)
                for (const auto& c : m)
                    next.push_back({l[0] * c[0], l[1] * c[1]});
            out = std::move(next);
        }
        return out;
    }

    template <typename Fn>
    void for_each_choice(const Vec2& base, const std::vector<std::vector<Vec2>>& from_parents,
                         const std::vector<std::vector<Vec2>>& lambdas, Fn&& fn) {
        const auto Ls = combine_lambdas(base, lambdas);
        const std::size_t np = from_parents.size();
        std::vector<std::size_t> choice(np, 0);
        std::vector<const Vec2*> pi(np);
        while (true) {
            for (std::size_t i = 0; i < np; ++i)
                pi[i] = &from_parents[i][choice[i]];
            for (const auto& L : Ls)
                fn(pi, L);
            std::size_t p = np;
            while (p-- > 0) {
                if (++choice[p] < from_parents[p].size())
                    break;
                choice[p] = 0;
            }
            if (p == static_cast<std::size_t>(-1))
                break;
        }
    }

    // Normalizes, drops massless candidates, keeps the extremes of the first coordinate.
    std::vector<Vec2> envelope(const std::vector<Vec2>& raw) {
        diag_.candidates_examined += raw.size();
        diag_.max_slice_size = std::max<std::size_t>(diag_.max_slice_size, 2);
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& c : raw) {
            const double mass = c[0] + c[1];
            if (!(mass > opts_.mass_floor)) {
                ++diag_.massless_skipped;
                continue;
            }
            lo = std::min(lo, c[0] / mass);
            hi = std::max(hi, c[0] / mass);
        }
        if (lo > hi)
            throw ZeroEvidenceError("every candidate gives the evidence zero probability");
        std::vector<Vec2> out{{lo, 1.0 - lo}};
        if (hi - lo > kDedupTol)
            out.push_back({hi, 1.0 - hi});
        diag_.re_removed += raw.size() - out.size();
        return out;
    }

    const EngineOptions& opts_;
    Diagnostics& diag_;
    const Relevant& rel_;
    std::vector<Vec2> mask_; // evidence indicator per node
    std::vector<std::vector<double>> lo_, hi_;
};

} // namespace

bool binary_polytree_eligible(const CredalNetwork& net, const Query& query) {
    return Relevant(net, relevant_nodes(net, query)).binary_polytree();
}

InferenceResult binary_polytree_bounds(const CredalNetwork& net, const Query& query, const EngineOptions& opts) {
    // Runs on the original network restricted to the relevant nodes; no subnetwork is built.
    const Relevant rel(net, relevant_nodes(net, query));
    if (!rel.binary_polytree()) {
        auto result = separable_ve(net, query, opts);
        result.diagnostics.method = "separable";
        result.diagnostics.notes.push_back(
            "binary-polytree fast path not applicable (relevant subnetwork is not a binary polytree)");
        return result;
    }

    Diagnostics diag;
    Propagator prop(net, rel, query, opts, diag);
    auto cands = prop.toward_child(query.target, std::nullopt);

    std::vector<Factor> factors;
    for (const auto& c : cands)
        factors.emplace_back(std::vector<VarId>{query.target}, std::vector<std::size_t>{2},
                             std::vector<double>{c[0], c[1]});
    auto result = posterior_bounds_from_candidates(factors, query, opts.mass_floor);
    diag.merge(result.diagnostics);
    result.diagnostics = std::move(diag);
    result.diagnostics.method = "binary-polytree";
    return result;
}

} // namespace credal
