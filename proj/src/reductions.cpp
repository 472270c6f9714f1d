#include "credal/reductions.hpp"

#include <string>

#include "credal/errors.hpp"

namespace credal {

std::uint64_t SubsetSumInstance::total() const {
    std::uint64_t sum = 0;
    for (auto x : s) {
        if (sum + x < sum)
            throw ValidationError("subset sum total overflows");
        sum += x;
    }
    return sum;
}

void SubsetSumInstance::validate() const {
    if (s.empty())
        throw ValidationError("set: must contain at least one element");
    if (l == 0)
        throw ValidationError("target: must be a positive integer");
}

namespace {

Distribution point_mass(std::size_t card, std::size_t at) {
    Distribution d(card, 0.0);
    d[at] = 1.0;
    return d;
}

// Reduction network where X_i's vertex list is given by `x_vertices(i)`.
template <typename XVertices>
std::pair<CredalNetwork, Query> build(const SubsetSumInstance& inst, XVertices&& x_vertices) {
    inst.validate();
    const std::uint64_t total = inst.total();
    if (inst.l > total)
        throw ValidationError("target: exceeds the sum of the set");
    const std::uint64_t card = total + 1;
    const std::size_t n = inst.s.size();
    if (n > 1 && (card > kMaxReductionTable / card || card * card > kMaxReductionTable / card))
        throw ResourceLimitError("summation table too large", std::to_string(card) + "^3");

    std::vector<std::string> labels;
    for (std::uint64_t v = 0; v < card; ++v)
        labels.push_back(std::to_string(v));

    // Ids: X_i -> i - 1, Y_i -> n + i - 1.
    std::vector<Variable> vars;
    std::vector<std::vector<VarId>> parents;
    std::vector<LocalCredalSet> locals;
    for (std::size_t i = 0; i < n; ++i) {
        vars.push_back({i, "X" + std::to_string(i + 1), labels});
        parents.push_back({});
        locals.push_back({i, {x_vertices(i, card)}});
    }
    for (std::size_t i = 1; i < n; ++i) {
        const VarId id = n + i - 1;
        const VarId left = i == 1 ? 0 : id - 1;
        vars.push_back({id, "Y" + std::to_string(i), labels});
        parents.push_back({left, i});
        LocalCredalSet local{id, {}};
        local.rows.reserve(card * card);
        for (std::uint64_t a = 0; a < card; ++a)
            for (std::uint64_t b = 0; b < card; ++b)
                local.rows.push_back({point_mass(card, std::min(a + b, total))});
        locals.push_back(std::move(local));
    }

    Query query;
    query.target = n == 1 ? 0 : 2 * n - 2;
    CredalNetwork net(std::move(vars), Dag(2 * n - 1, std::move(parents)), std::move(locals));
    return {std::move(net), std::move(query)};
}

} // namespace

std::pair<CredalNetwork, Query> subsetsum_to_network(const SubsetSumInstance& inst) {
    return build(inst, [&](std::size_t i, std::size_t card) {
        std::vector<Distribution> vertices{point_mass(card, 0)};
        if (inst.s[i] != 0)
            vertices.push_back(point_mass(card, inst.s[i]));
        return vertices;
    });
}

bool subsetsum_oracle(const SubsetSumInstance& inst) {
    inst.validate();
    if (inst.s.size() > 25)
        throw ResourceLimitError("instance too large for exhaustive check",
                                 "2^" + std::to_string(inst.s.size()));
    const std::size_t n = inst.s.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1U)
                sum += inst.s[i];
        if (sum == inst.l)
            return true;
    }
    return false;
}

double subsetsum_upper(const SubsetSumInstance& inst, const EngineOptions& opts) {
    inst.validate();
    if (inst.l > inst.total())
        return 0.0;
    auto [net, query] = subsetsum_to_network(inst);
    return separable_ve(net, query, opts).bounds.at(inst.l).upper;
}

bool subsetsum_verify_choice(const SubsetSumInstance& inst, const std::vector<bool>& include) {
    if (include.size() != inst.s.size())
        throw ValidationError("choice: needs one flag per set element");
    inst.validate();
    if (inst.l > inst.total())
        return false;
    auto [net, query] = build(inst, [&](std::size_t i, std::size_t card) {
        return std::vector<Distribution>{point_mass(card, include[i] ? inst.s[i] : 0)};
    });
    EngineOptions opts;
    opts.exec = Execution::serial;
    // Every local set is a single vertex, so this is one ordinary elimination pass.
    return separable_ve(net, query, opts).bounds.at(inst.l).upper > 1.0 - 1e-9;
}

} // namespace credal
