#include <doctest.h>

#include <bitset>
#include <random>

#include "credal/errors.hpp"
#include "credal/graph.hpp"
#include "credal/reductions.hpp"
#include "support.hpp"

using namespace credal;
using namespace credal::testing;

namespace {

// Independent reachable-sums table.
bool reachable_sum(const SubsetSumInstance& inst) {
    std::bitset<512> sums;
    sums[0] = true;
    for (auto x : inst.s)
        sums |= sums << x;
    return inst.l < sums.size() && sums[inst.l];
}

SubsetSumInstance random_instance(std::mt19937_64& rng, std::size_t max_n, std::uint64_t max_s) {
    SubsetSumInstance inst;
    const std::size_t n = 1 + rng() % max_n;
    for (std::size_t i = 0; i < n; ++i)
        inst.s.push_back(rng() % (max_s + 1));
    inst.l = 1 + rng() % (inst.total() + 2);
    return inst;
}

} // namespace

TEST_CASE("reduction network shape") {
    const auto [net, q] = subsetsum_to_network({{1, 2}, 3});
    REQUIRE(net.size() == 3);
    for (VarId v = 0; v < 3; ++v)
        CHECK(net.cardinality(v) == 4);
    CHECK(net.variables()[0].name == "X1");
    CHECK(net.variables()[2].name == "Y1");
    CHECK(net.dag().parents(2) == std::vector<VarId>{0, 1});
    CHECK(q.target == 2);
    CHECK(q.evidence.empty());
    CHECK(is_polytree(net.dag()));
    // X_i: point masses at 0 and at s_i.
    REQUIRE(net.local(1).rows.size() == 1);
    REQUIRE(net.local(1).rows[0].size() == 2);
    CHECK(net.local(1).rows[0][1][2] == 1.0);
    // Y1 at parents (1, 2) is the point mass at 3.
    CHECK(net.local(2).rows[net.parent_config_index(2, std::vector<std::size_t>{1, 2})][0][3] == 1.0);
    // Clipped: (3, 3) stays at the top value.
    CHECK(net.local(2).rows[net.parent_config_index(2, std::vector<std::size_t>{3, 3})][0][3] == 1.0);
}

TEST_CASE("single-element instance queries X1") {
    const auto [net, q] = subsetsum_to_network({{5}, 5});
    CHECK(net.size() == 1);
    CHECK(q.target == 0);
    CHECK(subsetsum_upper({{5}, 5}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(subsetsum_upper({{5}, 3}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero elements carry a single vertex") {
    const auto [net, q] = subsetsum_to_network({{0, 2}, 2});
    CHECK(net.local(0).rows[0].size() == 1);
    CHECK(net.local(1).rows[0].size() == 2);
}

TEST_CASE("upper probability decides small instances") {
    CHECK(subsetsum_upper({{1, 2}, 3}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(subsetsum_upper({{2, 3}, 5}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(subsetsum_upper({{2, 3}, 4}) < 1.0 - 1e-9);
    CHECK(subsetsum_upper({{1, 2, 3}, 4}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(subsetsum_upper({{2, 4}, 5}) < 1.0 - 1e-9);
}

TEST_CASE("oracle examples") {
    CHECK(subsetsum_oracle({{1, 2, 3}, 4}));
    CHECK_FALSE(subsetsum_oracle({{2, 4}, 5}));
    CHECK_FALSE(subsetsum_oracle({{0}, 1}));
    CHECK(subsetsum_oracle({{0, 7}, 7}));
}

TEST_CASE("targets above the total are no instances") {
    CHECK(subsetsum_upper({{1, 2}, 4}) == 0.0);
    CHECK_FALSE(subsetsum_oracle({{1, 2}, 4}));
    CHECK_THROWS_AS(subsetsum_to_network({{1, 2}, 4}), ValidationError);
}

TEST_CASE("invalid instances are rejected") {
    CHECK_THROWS_AS(subsetsum_to_network({{}, 1}), ValidationError);
    CHECK_THROWS_AS(subsetsum_upper({{}, 1}), ValidationError);
    CHECK_THROWS_AS(subsetsum_to_network({{1, 2}, 0}), ValidationError);
    SubsetSumInstance many;
    many.s.assign(26, 1);
    many.l = 3;
    CHECK_THROWS_AS(subsetsum_oracle(many), ResourceLimitError);
    CHECK_THROWS_AS(subsetsum_to_network({{1'000'000, 1'000'000}, 5}), ResourceLimitError);
}

TEST_CASE("reduction fidelity on random instances") {
    std::mt19937_64 rng(131);
    int yes = 0, no = 0;
    for (int trial = 0; trial < 150; ++trial) {
        auto inst = random_instance(rng, 8, 10);
        while (inst.total() > 20) {
            inst.s.pop_back();
            if (inst.s.empty())
                inst.s.push_back(rng() % 11);
        }
        inst.l = std::min<std::uint64_t>(inst.l, inst.total() + 1);
        if (inst.l == 0)
            inst.l = 1;
        const bool truth = reachable_sum(inst);
        CHECK(subsetsum_oracle(inst) == truth);
        const double upper = subsetsum_upper(inst);
        if (truth) {
            CHECK(upper == doctest::Approx(1.0).epsilon(1e-9));
            ++yes;
        } else {
            CHECK(upper < 1.0 - 1e-9);
            ++no;
        }
        if (inst.l <= inst.total()) {
            const auto [net, q] = subsetsum_to_network(inst);
            CHECK(is_polytree(net.dag()));
            CHECK(net.size() == (inst.s.size() == 1 ? 1 : 2 * inst.s.size() - 1));
        }
    }
    CHECK(yes > 20);
    CHECK(no > 20);
}

TEST_CASE("a single choice is verified by one propagation") {
    const SubsetSumInstance inst{{3, 5, 7}, 12};
    CHECK(subsetsum_verify_choice(inst, {false, true, true}));
    CHECK_FALSE(subsetsum_verify_choice(inst, {true, true, false}));
    CHECK_FALSE(subsetsum_verify_choice(inst, {true, true, true}));
    CHECK_THROWS_AS(subsetsum_verify_choice(inst, {true}), ValidationError);

    // Some choice verifies exactly on yes instances.
    std::mt19937_64 rng(137);
    for (int trial = 0; trial < 30; ++trial) {
        auto inst2 = random_instance(rng, 5, 6);
        if (inst2.l > inst2.total())
            continue;
        bool any = false;
        const std::size_t n = inst2.s.size();
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n) && !any; ++mask) {
            std::vector<bool> include(n);
            for (std::size_t i = 0; i < n; ++i)
                include[i] = (mask >> i) & 1;
            any = subsetsum_verify_choice(inst2, include);
        }
        CHECK(any == reachable_sum(inst2));
    }
}
