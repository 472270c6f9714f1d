#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "credal/errors.hpp"
#include "credal/geometry.hpp"
#include "credal/model.hpp"

namespace credal {

int available_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0)
        omp_set_num_threads(n);
#else
    (void)n;
#endif
}

PointSet::PointSet(std::size_t dim, std::vector<std::vector<double>> const& points) : dim_(dim) {
    for (const auto& p : points)
        push_back(p);
}

void PointSet::push_back(std::span<const double> p) {
    if (p.size() != dim_)
        throw ValidationError("point dimension mismatch");
    for (double x : p)
        if (!std::isfinite(x))
            throw ValidationError("point coordinates must be finite");
    data_.insert(data_.end(), p.begin(), p.end());
}

PointSet PointSet::subset(std::span<const std::size_t> indices) const {
    PointSet out(dim_);
    out.data_.reserve(indices.size() * dim_);
    for (std::size_t i : indices)
        out.data_.insert(out.data_.end(), data_.begin() + i * dim_, data_.begin() + (i + 1) * dim_);
    return out;
}

std::vector<std::vector<double>> PointSet::to_vectors() const {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < size(); ++i)
        out.emplace_back((*this)[i].begin(), (*this)[i].end());
    return out;
}

std::vector<std::size_t> dedup_indices(const PointSet& points) {
    const std::size_t n = points.size();
    const std::size_t d = points.dim();
    if (d == 0)
        return n == 0 ? std::vector<std::size_t>{} : std::vector<std::size_t>{0};

    // Sort by the first coordinate so near-equal points sit in a narrow window.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a][0] < points[b][0]; });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r)
        rank[order[r]] = r;

    auto close = [&](std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < d; ++c)
            if (std::abs(points[a][c] - points[b][c]) > kDedupTol)
                return false;
        return true;
    };

    std::vector<bool> dropped(n, false);
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n; ++i) {
        if (dropped[i])
            continue;
        kept.push_back(i);
        const double x0 = points[i][0];
        for (std::size_t r = rank[i] + 1; r < n && points[order[r]][0] - x0 <= kDedupTol; ++r)
            if (order[r] > i && close(i, order[r]))
                dropped[order[r]] = true;
        for (std::size_t r = rank[i]; r-- > 0 && x0 - points[order[r]][0] <= kDedupTol;)
            if (order[r] > i && close(i, order[r]))
                dropped[order[r]] = true;
    }
    return kept;
}

namespace {

// Exact answer in one dimension: the first minimum and first maximum.
std::vector<std::size_t> extremes_1d(const PointSet& points, const std::vector<std::size_t>& idx) {
    std::size_t lo = idx.front(), hi = idx.front();
    for (std::size_t i : idx) {
        if (points[i][0] < points[lo][0])
            lo = i;
        if (points[i][0] > points[hi][0])
            hi = i;
    }
    std::vector<std::size_t> out{lo};
    if (hi != lo)
        out.push_back(hi);
    std::sort(out.begin(), out.end());
    return out;
}

PointSet all_but(const PointSet& points, const std::vector<std::size_t>& idx, std::size_t skip) {
    std::vector<std::size_t> rest;
    rest.reserve(idx.size() - 1);
    for (std::size_t j : idx)
        if (j != skip)
            rest.push_back(j);
    return points.subset(rest);
}

// A point that sticks out of the others' bounding box by more than the tolerance in some
// coordinate is a vertex. Uses the top two values per coordinate so each check is O(d).
std::vector<bool> box_screen(const PointSet& points, const std::vector<std::size_t>& idx, double abs_tol) {
    const std::size_t d = points.dim();
    std::vector<bool> vertex(idx.size(), false);
    if (idx.size() < 2)
        return vertex;
    for (std::size_t c = 0; c < d; ++c) {
        std::size_t max1 = 0, min1 = 0;
        for (std::size_t k = 1; k < idx.size(); ++k) {
            if (points[idx[k]][c] > points[idx[max1]][c])
                max1 = k;
            if (points[idx[k]][c] < points[idx[min1]][c])
                min1 = k;
        }
        double max2 = -INFINITY, min2 = INFINITY;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (k != max1)
                max2 = std::max(max2, points[idx[k]][c]);
            if (k != min1)
                min2 = std::min(min2, points[idx[k]][c]);
        }
        if (points[idx[max1]][c] > max2 + abs_tol)
            vertex[max1] = true;
        if (points[idx[min1]][c] < min2 - abs_tol)
            vertex[min1] = true;
    }
    return vertex;
}

double scale_of(const PointSet& points, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (std::size_t i : idx)
        for (double x : points[i])
            s = std::max(s, std::abs(x));
    return s;
}

} // namespace

std::vector<std::size_t> redundancy_eliminate_naive(const PointSet& points, double tol) {
    if (points.empty())
        throw ValidationError("redundancy elimination needs a nonempty point set");
    auto idx = dedup_indices(points);
    if (idx.size() <= 2)
        return idx;
    std::vector<std::size_t> survivors;
    for (std::size_t i : idx)
        if (!is_convex_combination(points[i], all_but(points, idx, i), tol).member)
            survivors.push_back(i);
    return survivors;
}

namespace {

struct Extreme {
    std::size_t index;
    /// Gap between the best and the runner-up value of d.x.
    double margin;
};

// First index (in `idx` order) maximizing d.x, ties within `eps` resolved lexicographically
// toward the larger point; the result is an extreme point of the set.
Extreme argmax_along(const PointSet& points, const std::vector<std::size_t>& idx,
                     const std::vector<double>& d, double eps) {
    auto dot = [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t c = 0; c < d.size(); ++c)
            s += d[c] * points[i][c];
        return s;
    };
    std::size_t best = 0;
    double best_val = dot(idx[0]), second = -INFINITY;
    for (std::size_t k = 1; k < idx.size(); ++k) {
        const double v = dot(idx[k]);
        if (v > best_val + eps) {
            second = best_val;
            best = k;
            best_val = v;
        } else if (v >= best_val - eps) {
            second = std::max(second, std::min(v, best_val));
            const auto p = points[idx[k]], q = points[idx[best]];
            if (std::lexicographical_compare(q.begin(), q.end(), p.begin(), p.end())) {
                best = k;
                best_val = std::max(best_val, v);
            }
        } else {
            second = std::max(second, v);
        }
    }
    return {best, best_val - second};
}

// A strict maximizer along d whose lead exceeds what the per-coordinate tolerance can move
// d.x is not within tolerance of any mixture of the others.
bool certified(const Extreme& e, const std::vector<double>& d, double abs_tol) {
    double norm = 0.0;
    for (double x : d)
        norm += std::abs(x);
    return e.margin > 2.0 * norm * abs_tol;
}

template <typename Fn>
void for_each_index(std::size_t count, bool parallel, Fn&& fn) {
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (std::size_t k = 0; k < count; ++k) {
        try {
            fn(k);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace

std::vector<std::size_t> redundancy_eliminate_indices(const PointSet& points, double tol, Execution exec) {
    if (points.empty())
        throw ValidationError("redundancy elimination needs a nonempty point set");
    auto idx = dedup_indices(points);
    if (idx.size() <= 2)
        return idx;
    if (points.dim() == 1)
        return extremes_1d(points, idx);

    const std::size_t n = idx.size();
    const double scale = scale_of(points, idx);
    const double abs_tol = tol * scale;
    const bool parallel = exec == Execution::parallel && n > 8;

    // Grow a set of exact extreme points (box extremes, then maximizers along separating
    // directions) until every other point is either inside its hull or shown to need a full
    // test. Rounds are processed in a fixed order, so the outcome is independent of threads.
    std::vector<char> in_hull_set(n, 0), proven(n, 0);
    std::vector<std::size_t> hull;
    auto add = [&](std::size_t k) {
        if (!in_hull_set[k]) {
            in_hull_set[k] = 1;
            hull.push_back(k);
        }
    };
    const auto screened = box_screen(points, idx, abs_tol);
    for (std::size_t k = 0; k < n; ++k)
        if (screened[k]) {
            add(k);
            proven[k] = 1;
        }
    for (double sign : {1.0, -1.0}) {
        std::vector<double> e(points.dim(), 0.0);
        e[0] = sign;
        const auto x = argmax_along(points, idx, e, 0.0);
        add(x.index);
        proven[x.index] = proven[x.index] || certified(x, e, abs_tol);
    }

    // 0 = inside the hull of other points, 1 = needs the full test, 2 = pending.
    std::vector<char> state(n, 2);
    std::vector<std::size_t> pending;
    for (std::size_t k = 0; k < n; ++k)
        if (!in_hull_set[k])
            pending.push_back(k);
    while (!pending.empty()) {
        std::vector<std::size_t> members;
        for (std::size_t k : hull)
            members.push_back(idx[k]);
        const PointSet current = points.subset(members);
        std::vector<Combination> results(pending.size());
        for_each_index(pending.size(), parallel,
                       [&](std::size_t j) { results[j] = is_convex_combination(points[idx[pending[j]]], current, tol); });

        std::vector<std::size_t> next;
        const std::size_t snapshot = hull.size();
        bool grew = false;
        for (std::size_t j = 0; j < pending.size(); ++j) {
            const std::size_t k = pending[j];
            if (results[j].member) {
                state[k] = 0;
                continue;
            }
            if (results[j].direction.empty()) {
                state[k] = 1;
                continue;
            }
            const auto x = argmax_along(points, idx, results[j].direction, 0.0);
            const std::size_t q = x.index;
            const bool known = in_hull_set[q] != 0;
            if (known && std::find(hull.begin(), hull.begin() + snapshot, q) != hull.begin() + snapshot) {
                // The round's hull already held the maximizer; the direction was not reliable.
                state[k] = 1;
                continue;
            }
            if (!known) {
                add(q);
                proven[q] = certified(x, results[j].direction, abs_tol);
                grew = true;
            }
            if (q != k)
                next.push_back(k);
        }
        if (!grew) {
            for (std::size_t k : next)
                state[k] = 1;
            break;
        }
        std::vector<std::size_t> still;
        for (std::size_t k : next)
            if (!in_hull_set[k])
                still.push_back(k);
        pending = std::move(still);
    }

    // Uncertified hull members and undecided points are checked against every other point.
    std::vector<std::size_t> full;
    for (std::size_t k = 0; k < n; ++k)
        if (in_hull_set[k] ? !proven[k] : state[k] == 1)
            full.push_back(k);
    std::vector<char> keep(n, 0);
    for (std::size_t k = 0; k < n; ++k)
        keep[k] = proven[k];
    for_each_index(full.size(), parallel, [&](std::size_t j) {
        const std::size_t k = full[j];
        keep[k] = is_convex_combination(points[idx[k]], all_but(points, idx, idx[k]), tol).member ? 0 : 1;
    });

    std::vector<std::size_t> survivors;
    for (std::size_t k = 0; k < n; ++k)
        if (keep[k])
            survivors.push_back(idx[k]);
    if (survivors.size() == n)
        return survivors;

    // Points within tolerance of each other can shadow one another. Reinstate any removed
    // point the survivors alone do not reach, in input order.
    for (std::size_t k = 0; k < n; ++k) {
        if (keep[k])
            continue;
        if (survivors.empty() ||
            !is_convex_combination(points[idx[k]], points.subset(survivors), tol).member) {
            survivors.insert(std::upper_bound(survivors.begin(), survivors.end(), idx[k]), idx[k]);
            keep[k] = 1;
        }
    }
    return survivors;
}

PointSet redundancy_eliminate(const PointSet& points, double tol, Execution exec) {
    auto idx = redundancy_eliminate_indices(points, tol, exec);
    return points.subset(idx);
}

} // namespace credal
