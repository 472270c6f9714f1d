#include <doctest.h>

#include <algorithm>
#include <random>
#include <cmath>

#include "credal/errors.hpp"
#include "credal/geometry.hpp"
#include "credal/model.hpp"

using namespace credal;

namespace {

const std::vector<double> f1{0.14, 0.06, 0.56, 0.24};
const std::vector<double> f2{0.48, 0.32, 0.12, 0.08};
const std::vector<double> f3{0.32, 0.08, 0.48, 0.12};
const std::vector<double> f4{0.63, 0.27, 0.07, 0.03};

std::vector<double> mix(const std::vector<double>& a, double wa, const std::vector<double>& b, double wb) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = wa * a[i] + wb * b[i];
    return out;
}

std::vector<double> cat(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Random point sets of several textures: generic clouds, points on the simplex, lattice
// points with duplicates, and explicit convex combinations.
PointSet random_points(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t dim = 1 + rng() % 4;
    const std::size_t count = 1 + rng() % 50;
    const int texture = static_cast<int>(rng() % 4);
    PointSet ps(dim);
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> p(dim);
        if (texture == 3 && ps.size() >= 2) {
            const auto a = ps[rng() % ps.size()], b = ps[rng() % ps.size()];
            const double w = u(rng);
            for (std::size_t i = 0; i < dim; ++i)
                p[i] = w * a[i] + (1 - w) * b[i];
        } else {
            double sum = 0;
            for (auto& x : p) {
                x = texture == 2 ? static_cast<double>(rng() % 3) : u(rng);
                sum += x;
            }
            if (texture == 1 && sum > 0)
                for (auto& x : p)
                    x /= sum;
        }
        ps.push_back(p);
    }
    return ps;
}

// Same points up to kDedupTol in max-norm, as sets.
bool same_set(const PointSet& a, const PointSet& b) {
    auto covered = [](const PointSet& x, const PointSet& y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            bool found = false;
            for (std::size_t j = 0; j < y.size() && !found; ++j) {
                double gap = 0.0;
                for (std::size_t d = 0; d < x.dim(); ++d)
                    gap = std::max(gap, std::abs(x[i][d] - y[j][d]));
                found = gap <= kDedupTol;
            }
            if (!found)
                return false;
        }
        return true;
    };
    return a.size() == b.size() && covered(a, b) && covered(b, a);
}

} // namespace

TEST_CASE("convex combination (4 f1 + 9 f3) / 13 recovers its weights") {
    const auto point = mix(f1, 4.0 / 13, f3, 9.0 / 13);
    const auto c = is_convex_combination(point, PointSet(4, {f1, f3}));
    REQUIRE(c.member);
    CHECK(c.weights[0] == doctest::Approx(4.0 / 13).epsilon(1e-9));
    CHECK(c.weights[1] == doctest::Approx(9.0 / 13).epsilon(1e-9));
}

TEST_CASE("l3 is not a combination of l1 and l2") {
    const auto l1 = cat(f1, f2), l2 = cat(f3, f4);
    const auto l3 = cat(mix(f1, 4.0 / 13, f3, 9.0 / 13), mix(f2, 0.5, f4, 0.5));
    CHECK_FALSE(is_convex_combination(l3, PointSet(8, {l1, l2})).member);
    // All four concatenations do contain it.
    const PointSet concatenations(8, {cat(f1, f2), cat(f1, f4), cat(f3, f2), cat(f3, f4)});
    CHECK(is_convex_combination(l3, concatenations).member);
    CHECK(redundancy_eliminate(PointSet(8, {l1, l2, l3})).size() == 3);
}

TEST_CASE("slice-wise elimination removes the mixture") {
    const auto m = mix(f1, 4.0 / 13, f3, 9.0 / 13);
    const PointSet ps(4, {f1, f3, m});
    CHECK(redundancy_eliminate_indices(ps) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("identity and collinear examples") {
    const std::vector<double> p{0.3, 0.7};
    const auto c = is_convex_combination(p, PointSet(2, {p}));
    REQUIRE(c.member);
    CHECK(c.weights[0] == doctest::Approx(1.0));
    const PointSet line(2, {{0.2, 0.8}, {0.5, 0.5}, {0.8, 0.2}});
    CHECK(redundancy_eliminate_indices(line) == std::vector<std::size_t>{0, 2});
    CHECK_FALSE(is_convex_combination(std::vector<double>{0.9, 0.1}, PointSet(2, {{0.2, 0.8}, {0.8, 0.2}})).member);
}

TEST_CASE("deduplication keeps first occurrences") {
    const PointSet ps(2, {{0.5, 0.5}, {0.1, 0.9}, {0.5, 0.5 + 1e-13}, {0.1, 0.9}});
    CHECK(dedup_indices(ps) == std::vector<std::size_t>{0, 1});
    CHECK(redundancy_eliminate_indices(ps) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("redundancy elimination agrees with the naive sweep") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        const auto ps = random_points(rng);
        const auto fast = redundancy_eliminate_indices(ps);
        const auto naive = redundancy_eliminate_naive(ps);
        CHECK(fast == naive);
    }
}

TEST_CASE("hull preservation and irredundancy") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 300; ++trial) {
        const auto ps = random_points(rng);
        const auto keep = redundancy_eliminate_indices(ps);
        const auto survivors = ps.subset(keep);
        const auto unique = dedup_indices(ps);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (std::binary_search(keep.begin(), keep.end(), i))
                continue;
            CHECK(is_convex_combination(ps[i], survivors).member);
        }
        if (keep.size() > 1)
            for (std::size_t k = 0; k < keep.size(); ++k) {
                std::vector<std::size_t> rest;
                for (std::size_t j = 0; j < keep.size(); ++j)
                    if (j != k)
                        rest.push_back(keep[j]);
                CHECK_FALSE(is_convex_combination(ps[keep[k]], ps.subset(rest)).member);
            }
        CHECK(keep.size() <= unique.size());
    }
}

TEST_CASE("idempotence and permutation invariance") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        const auto ps = random_points(rng);
        const auto once = redundancy_eliminate(ps);
        const auto twice = redundancy_eliminate(once);
        CHECK(once.to_vectors() == twice.to_vectors());

        std::vector<std::size_t> perm(ps.size());
        for (std::size_t i = 0; i < perm.size(); ++i)
            perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto shuffled = ps.subset(perm);
        // Near-duplicates may be represented by a different member of their cluster.
        CHECK(same_set(redundancy_eliminate(ps), redundancy_eliminate(shuffled)));
    }
}

TEST_CASE("serial and parallel elimination agree") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ps = random_points(rng);
        CHECK(redundancy_eliminate_indices(ps, kLpTol, Execution::serial) ==
              redundancy_eliminate_indices(ps, kLpTol, Execution::parallel));
    }
}

TEST_CASE("one-dimensional sets keep their extremes") {
    const PointSet ps(1, {{0.4}, {0.1}, {0.9}, {0.1}, {0.5}});
    CHECK(redundancy_eliminate_indices(ps) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("dimension mismatch is rejected") {
    CHECK_THROWS(is_convex_combination(std::vector<double>{1.0}, PointSet(2, {{0.0, 1.0}})));
}
