#include <doctest.h>

#include <functional>
#include <random>
#include <set>

#include "credal/graph.hpp"
#include "credal/reductions.hpp"
#include "support.hpp"

using namespace credal;
using namespace credal::testing;

namespace {

Dag random_dag(std::mt19937_64& rng, std::size_t n, double density) {
    std::vector<VarId> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<VarId>> parents(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (u(rng) < density)
                parents[perm[j]].push_back(perm[i]);
    return Dag(n, std::move(parents));
}

std::vector<bool> descendants_or_self(const Dag& dag, VarId v) {
    std::vector<bool> seen(dag.size(), false);
    std::vector<VarId> stack{v};
    seen[v] = true;
    while (!stack.empty()) {
        const VarId x = stack.back();
        stack.pop_back();
        for (VarId c : dag.children(x))
            if (!seen[c]) {
                seen[c] = true;
                stack.push_back(c);
            }
    }
    return seen;
}

// Exhaustive search over simple undirected paths; a path is active when every collider on it
// has itself or a descendant in `given` and every other interior node is outside `given`.
bool d_separated_by_paths(const Dag& dag, VarId a, VarId b, const std::set<VarId>& given) {
    const std::size_t n = dag.size();
    std::vector<bool> on_path(n, false);
    std::vector<VarId> path{a};
    on_path[a] = true;
    std::function<bool(VarId)> extend = [&](VarId x) -> bool {
        if (x == b) {
            for (std::size_t i = 1; i + 1 < path.size(); ++i) {
                const VarId prev = path[i - 1], m = path[i], next = path[i + 1];
                const bool collider = dag.has_arc(prev, m) && dag.has_arc(next, m);
                if (collider) {
                    const auto desc = descendants_or_self(dag, m);
                    bool hit = false;
                    for (VarId s : given)
                        hit = hit || desc[s];
                    if (!hit)
                        return false;
                } else if (given.count(m)) {
                    return false;
                }
            }
            return true;
        }
        std::vector<VarId> nbrs = dag.parents(x);
        nbrs.insert(nbrs.end(), dag.children(x).begin(), dag.children(x).end());
        for (VarId y : nbrs) {
            if (on_path[y])
                continue;
            on_path[y] = true;
            path.push_back(y);
            const bool active = extend(y);
            path.pop_back();
            on_path[y] = false;
            if (active)
                return true;
        }
        return false;
    };
    return !extend(a);
}

// Largest scope (eliminated variable plus its neighbours) met while eliminating in `order`.
std::size_t induced_width(const CredalNetwork& net, const Query& q, const std::vector<VarId>& order) {
    const std::size_t n = net.size();
    std::vector<std::set<VarId>> adj(n);
    for (VarId v = 0; v < n; ++v) {
        const auto& ps = net.dag().parents(v);
        std::vector<VarId> family(ps.begin(), ps.end());
        family.push_back(v);
        for (VarId x : family)
            for (VarId y : family)
                if (x != y && !q.observed(x) && !q.observed(y))
                    adj[x].insert(y);
    }
    std::size_t widest = 0;
    for (VarId x : order) {
        widest = std::max(widest, adj[x].size() + 1);
        for (VarId y : adj[x]) {
            for (VarId z : adj[x])
                if (y != z)
                    adj[y].insert(z);
            adj[y].erase(x);
        }
        adj[x].clear();
    }
    return widest;
}

CredalNetwork uniform_network(const Dag& dag) {
    std::vector<Variable> vars;
    std::vector<LocalCredalSet> locals;
    for (VarId v = 0; v < dag.size(); ++v) {
        vars.push_back(var(v, "N" + std::to_string(v) + "_", 2));
        LocalCredalSet local{v, {}};
        for (std::size_t c = 0; c < (std::size_t{1} << dag.parents(v).size()); ++c)
            local.rows.push_back({{0.5, 0.5}});
        locals.push_back(local);
    }
    std::vector<std::vector<VarId>> parents;
    for (VarId v = 0; v < dag.size(); ++v)
        parents.push_back(dag.parents(v));
    return CredalNetwork(vars, Dag(dag.size(), parents), locals);
}

} // namespace

TEST_CASE("d-separation examples") {
    const auto net = figure1();
    const auto& dag = net.dag();
    const VarId A = id_of(net, "A"), B = id_of(net, "B"), C = id_of(net, "C"), D = id_of(net, "D"),
                E = id_of(net, "E"), H = id_of(net, "H");
    CHECK(d_separated(dag, A, D, {B}));
    CHECK_FALSE(d_separated(dag, A, D, {}));
    CHECK(d_separated(dag, C, D, {B}));
    CHECK_FALSE(d_separated(dag, C, D, {B, E}));
    CHECK(d_separated(dag, H, A, {}));
    CHECK(d_separated_by_paths(dag, H, A, {}));
    CHECK_THROWS(d_separated(dag, A, A, {}));
    CHECK_THROWS(d_separated(dag, A, D, {A}));

    // Collider C -> E <- D on its own.
    const Dag collider(3, {{}, {}, {0, 1}});
    CHECK(d_separated(collider, 0, 1, {}));
    CHECK_FALSE(d_separated(collider, 0, 1, {2}));
}

TEST_CASE("d-separation agrees with exhaustive path enumeration") {
    std::mt19937_64 rng(3);
    int cases = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 6;
        const Dag dag = random_dag(rng, n, 0.2 + 0.5 * (rng() % 100) / 100.0);
        for (VarId a = 0; a < n; ++a)
            for (VarId b = 0; b < n; ++b) {
                if (a == b)
                    continue;
                std::set<VarId> given;
                for (VarId s = 0; s < n; ++s)
                    if (s != a && s != b && rng() % 3 == 0)
                        given.insert(s);
                CHECK(d_separated(dag, a, b, given) == d_separated_by_paths(dag, a, b, given));
                ++cases;
            }
    }
    CHECK(cases > 1000);
}

TEST_CASE("relevant subnetwork examples") {
    const auto net = figure1();
    const VarId A = id_of(net, "A"), B = id_of(net, "B"), F = id_of(net, "F");

    auto all = relevant_subnetwork(net, Query{F, {}});
    CHECK(all.report.kept.size() == 8);
    CHECK(all.report.removed.empty());

    auto only_a = relevant_subnetwork(net, Query{A, {}});
    CHECK(only_a.report.kept == std::vector<VarId>{A});
    CHECK(only_a.report.removed.size() == 7);
    for (VarId r : only_a.report.removed)
        CHECK(only_a.report.reasons.at(r) == RemovalReason::barren);

    auto ab = relevant_subnetwork(net, Query{B, {{A, 0}}});
    CHECK(ab.report.kept == std::vector<VarId>{A, B});
    CHECK(ab.network.size() == 2);
    CHECK(ab.query.target == *ab.report.to_sub(B));
    CHECK(ab.query.evidence.at(*ab.report.to_sub(A)) == 0);
}

TEST_CASE("d-separated nodes are reported as such") {
    // X -> Y -> Z with Y observed: X is cut off from Z.
    const auto net = uniform_network(Dag(3, {{}, {0}, {1}}));
    auto sub = relevant_subnetwork(net, Query{2, {{1, 0}}});
    CHECK(sub.report.kept == std::vector<VarId>{1, 2});
    CHECK(sub.report.reasons.at(0) == RemovalReason::d_separated);
    // Y survives as a clamped root with a point mass on its observed value.
    CHECK(sub.report.clamped_roots == std::vector<VarId>{1});
    const VarId y = *sub.report.to_sub(1);
    CHECK(sub.network.dag().parents(y).empty());
    CHECK(sub.network.local(y).rows[0] == std::vector<Distribution>{{1.0, 0.0}});
}

TEST_CASE("relevant subnetwork is idempotent and self-contained") {
    std::mt19937_64 rng(17);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        RandomNetworkOptions o;
        o.nodes = 2 + seed % 7;
        o.seed = seed;
        o.max_parents = 3;
        const auto net = random_network(o);
        const auto q = random_query(net, rng, 2);
        const auto once = relevant_subnetwork(net, q);
        const auto twice = relevant_subnetwork(once.network, once.query);
        CHECK(twice.network.size() == once.network.size());
        CHECK(twice.report.removed.empty());
        CHECK(approx_equal(twice.network, once.network));
        for (VarId v : once.report.kept)
            for (VarId p : net.dag().parents(v))
                CHECK((once.report.to_sub(p).has_value() || std::count(once.report.clamped_roots.begin(),
                                                                       once.report.clamped_roots.end(), v)));
        CHECK(once.report.kept.size() + once.report.removed.size() == net.size());
    }
}

TEST_CASE("bounds on the relevant subnetwork equal bounds on the full network") {
    std::mt19937_64 rng(23);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        RandomNetworkOptions o;
        o.nodes = 2 + seed % 4;
        o.seed = 100 + seed;
        o.max_vertices = 2;
        const auto net = random_network(o);
        if (vertex_combination_count(net) > 4096)
            continue;
        const auto q = random_query(net, rng, 2);
        const auto full = brute_force_bounds(net, q);
        const auto sub = relevant_subnetwork(net, q);
        const auto reduced = brute_force_bounds(sub.network, sub.query);
        REQUIRE(full.size() == reduced.size());
        for (std::size_t k = 0; k < full.size(); ++k) {
            if (!std::isfinite(full[k].lower))
                continue;
            CHECK(reduced[k].lower == doctest::Approx(full[k].lower).epsilon(1e-12));
            CHECK(reduced[k].upper == doctest::Approx(full[k].upper).epsilon(1e-12));
        }
    }
}

TEST_CASE("polytree detection") {
    CHECK_FALSE(is_polytree(figure1().dag()));
    CHECK(is_polytree(Dag(1, {{}})));
    CHECK(is_polytree(Dag(4, {{}, {}, {0, 1}, {}})));
    CHECK_FALSE(is_polytree(Dag(3, {{}, {0}, {0, 1}})));
    auto [net, q] = subsetsum_to_network(SubsetSumInstance{{1, 2, 3, 4}, 5});
    CHECK(is_polytree(net.dag()));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RandomNetworkOptions o;
        o.nodes = 1 + seed % 15;
        o.polytree = true;
        o.max_parents = 3;
        o.seed = seed;
        CHECK(is_polytree(random_network(o).dag()));
    }
}

TEST_CASE("elimination order examples") {
    const auto chain = uniform_network(Dag(3, {{}, {0}, {1}}));
    CHECK(elimination_order(chain, Query{2, {}}) == std::vector<VarId>{0, 1});

    // Two symmetric roots of one child: the lower id goes first.
    const auto vee = uniform_network(Dag(3, {{}, {}, {0, 1}}));
    CHECK(elimination_order(vee, Query{2, {}}) == std::vector<VarId>{0, 1});

    // Evidence never enters the order.
    const auto order = elimination_order(chain, Query{2, {{1, 0}}});
    CHECK(order == std::vector<VarId>{0});
}

TEST_CASE("elimination on polytrees stays within family size") {
    std::mt19937_64 rng(29);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RandomNetworkOptions o;
        o.nodes = 2 + seed % 14;
        o.polytree = true;
        o.binary = true;
        o.max_parents = 3;
        o.seed = 1000 + seed;
        const auto net = random_network(o);
        const auto q = random_query(net, rng, 2);
        std::size_t family = 1;
        for (VarId v = 0; v < net.size(); ++v)
            family = std::max(family, net.dag().parents(v).size() + 1);
        CHECK(induced_width(net, q, elimination_order(net, q)) <= family);
    }
}
