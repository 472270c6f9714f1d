#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "credal/execution.hpp"

namespace credal {

/// Default residual tolerance for convex-combination tests, relative to the largest
/// coordinate magnitude of the points involved.
inline constexpr double kLpTol = 1e-9;
inline constexpr std::size_t kLpIterationCap = 10'000;

/// Finite point set of uniform dimension, stored row-major.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::size_t dim) : dim_(dim) {}
    PointSet(std::size_t dim, std::vector<std::vector<double>> const& points);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    bool empty() const noexcept { return size() == 0; }

    std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    void push_back(std::span<const double> p);
    PointSet subset(std::span<const std::size_t> indices) const;
    std::vector<std::vector<double>> to_vectors() const;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

struct Combination {
    bool member = false;
    /// Mixing weights over `others` when member is true.
    std::vector<double> weights;
    /// When member is false, possibly a direction d with d.point > d.q for every q in
    /// `others`; empty when the test could not certify one.
    std::vector<double> direction;
};

/// Decides whether some alpha >= 0 with sum 1 satisfies sum_k alpha_k others[k] = point to
/// within tol (scaled by the largest coordinate magnitude) in every coordinate.
/// Solved with a dense phase-one simplex (largest reduced cost, Bland's rule once pivots stall).
/// Throws NumericalError when the iteration cap is hit.
Combination is_convex_combination(std::span<const double> point, const PointSet& others,
                                  double tol = kLpTol);

/// Indices of the first occurrence of every point, merging points within kDedupTol (max-norm).
std::vector<std::size_t> dedup_indices(const PointSet& points);

/// Indices (ascending) of the points that are not convex combinations of the remaining ones,
/// after deduplication. Removed points are guaranteed to lie in the hull of the survivors.
std::vector<std::size_t> redundancy_eliminate_indices(const PointSet& points, double tol = kLpTol,
                                                      Execution exec = Execution::parallel);

PointSet redundancy_eliminate(const PointSet& points, double tol = kLpTol,
                              Execution exec = Execution::parallel);

/// Reference sweep: each deduplicated point is tested by LP against all the others, with no
/// screening and no repair pass. Kept for differential testing and benchmarks.
std::vector<std::size_t> redundancy_eliminate_naive(const PointSet& points, double tol = kLpTol);

} // namespace credal
