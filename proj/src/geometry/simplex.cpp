#include <algorithm>
#include <cmath>
#include <limits>

#include "credal/errors.hpp"
#include "credal/geometry.hpp"

namespace credal {

namespace {

constexpr double kPivotEps = 1e-12;
constexpr std::size_t kDegenerateRun = 50;

// Dense phase-one tableau for A alpha = b, alpha >= 0, with one artificial per row.
// Columns [0, n) are structural, [n, n + m) artificial, the last is the right-hand side.
class PhaseOne {
public:
    PhaseOne(std::size_t rows, std::size_t cols)
        : m_(rows), n_(cols), width_(cols + rows + 1), t_(rows * width_, 0.0), basis_(rows), flipped_(rows) {}

    double& a(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
    double& rhs(std::size_t r) { return t_[r * width_ + width_ - 1]; }

    void init_basis() {
        for (std::size_t r = 0; r < m_; ++r) {
            flipped_[r] = rhs(r) < 0.0;
            if (flipped_[r])
                for (std::size_t c = 0; c < width_; ++c)
                    a(r, c) = -a(r, c);
            a(r, n_ + r) = 1.0;
            basis_[r] = n_ + r;
        }
    }

    double infeasibility() {
        double s = 0.0;
        for (std::size_t r = 0; r < m_; ++r)
            if (basis_[r] >= n_)
                s += rhs(r);
        return s;
    }

    // Returns once the artificial sum is minimal or drops to `good_enough`. Pivots on the most
    // negative reduced cost and switches to Bland's rule after a run of degenerate pivots.
    void solve(double good_enough) {
        std::vector<double> reduced(n_);
        std::size_t degenerate_run = 0;
        bool bland = false;
        for (std::size_t iter = 0;; ++iter) {
            if (infeasibility() <= good_enough)
                return;
            if (iter >= kLpIterationCap)
                throw NumericalError("simplex iteration cap reached");

            // Reduced cost of structural column c is -(sum of its entries in artificial rows).
            std::fill(reduced.begin(), reduced.end(), 0.0);
            for (std::size_t r = 0; r < m_; ++r) {
                if (basis_[r] < n_)
                    continue;
                const double* row = &t_[r * width_];
                for (std::size_t c = 0; c < n_; ++c)
                    reduced[c] -= row[c];
            }
            std::size_t enter = n_;
            double most = -kPivotEps;
            for (std::size_t c = 0; c < n_; ++c)
                if (reduced[c] < most) {
                    enter = c;
                    if (bland)
                        break;
                    most = reduced[c];
                }
            if (enter == n_)
                return;

            std::size_t leave = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double coef = a(r, enter);
                if (coef <= kPivotEps)
                    continue;
                const double ratio = rhs(r) / coef;
                if (ratio < best - kPivotEps ||
                    (ratio <= best + kPivotEps && leave < m_ && basis_[r] < basis_[leave])) {
                    best = std::min(best, ratio);
                    leave = r;
                }
            }
            if (leave == m_)
                throw NumericalError("unbounded phase-one direction");
            degenerate_run = best <= kPivotEps ? degenerate_run + 1 : 0;
            bland = bland || degenerate_run >= kDegenerateRun;
            pivot(leave, enter);
        }
    }

    // Phase-one simplex multipliers of the (sign-normalized) rows: y_r = sum of column n + r
    // over rows whose basic variable is artificial. At optimum y'A_j <= 0 for all j < n.
    std::vector<double> multipliers() const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_)
                continue;
            const double* row = &t_[r * width_];
            for (std::size_t k = 0; k < m_; ++k)
                y[k] += row[n_ + k];
        }
        for (std::size_t k = 0; k < m_; ++k)
            if (flipped_[k])
                y[k] = -y[k];
        return y;
    }

    std::vector<double> structural_values() const {
        std::vector<double> x(n_, 0.0);
        for (std::size_t r = 0; r < m_; ++r)
            if (basis_[r] < n_)
                x[basis_[r]] = std::max(0.0, t_[r * width_ + width_ - 1]);
        return x;
    }

private:
    void pivot(std::size_t pr, std::size_t pc) {
        double* prow = &t_[pr * width_];
        const double inv = 1.0 / prow[pc];
        for (std::size_t c = 0; c < width_; ++c)
            prow[c] *= inv;
        for (std::size_t r = 0; r < m_; ++r) {
            if (r == pr)
                continue;
            double* row = &t_[r * width_];
            const double f = row[pc];
            if (f == 0.0)
                continue;
            for (std::size_t c = 0; c < width_; ++c)
                row[c] -= f * prow[c];
            row[pc] = 0.0;
        }
        basis_[pr] = pc;
    }

    std::size_t m_, n_, width_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
    std::vector<bool> flipped_;
};

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

} // namespace

Combination is_convex_combination(std::span<const double> point, const PointSet& others, double tol) {
    const std::size_t d = point.size();
    const std::size_t k = others.size();
    if (k == 0)
        throw ValidationError("convex combination test needs at least one point");
    if (others.dim() != d)
        throw ValidationError("dimension mismatch in convex combination test");

    double scale = max_abs(point);
    for (std::size_t j = 0; j < k; ++j)
        scale = std::max(scale, max_abs(others[j]));
    if (scale == 0.0)
        return {true, std::vector<double>(k, 1.0 / static_cast<double>(k)), {}};
    const double abs_tol = tol * scale;

    // A coordinate outside the others' range cannot be reached by any mixture.
    for (std::size_t i = 0; i < d; ++i) {
        double lo = others[0][i], hi = lo;
        for (std::size_t j = 1; j < k; ++j) {
            lo = std::min(lo, others[j][i]);
            hi = std::max(hi, others[j][i]);
        }
        if (point[i] < lo - abs_tol || point[i] > hi + abs_tol) {
            Combination out;
            out.direction.assign(d, 0.0);
            out.direction[i] = point[i] > hi ? 1.0 : -1.0;
            return out;
        }
    }

    // Rows where every point agrees with `point` are implied by sum(alpha) = 1.
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < d; ++i) {
        bool constant = true;
        for (std::size_t j = 0; j < k && constant; ++j)
            constant = std::abs(others[j][i] - point[i]) <= abs_tol * 1e-3;
        if (!constant)
            rows.push_back(i);
    }

    PhaseOne lp(rows.size() + 1, k);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t j = 0; j < k; ++j)
            lp.a(r, j) = others[j][rows[r]] / scale;
        lp.rhs(r) = point[rows[r]] / scale;
    }
    for (std::size_t j = 0; j < k; ++j)
        lp.a(rows.size(), j) = 1.0;
    lp.rhs(rows.size()) = 1.0;
    lp.init_basis();
    lp.solve(tol * 1e-3);

    auto alpha = lp.structural_values();
    double sum = 0.0;
    for (double x : alpha)
        sum += x;
    bool reached = std::abs(sum - 1.0) <= tol;
    for (std::size_t i = 0; i < d && reached; ++i) {
        double mix = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            mix += alpha[j] * others[j][i];
        reached = std::abs(mix - point[i]) <= abs_tol;
    }
    if (reached)
        return {true, std::move(alpha), {}};

    // The multipliers' coordinate part separates the point from the others; keep it only
    // when it does so numerically.
    const auto y = lp.multipliers();
    Combination out;
    std::vector<double> dir(d, 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r)
        dir[rows[r]] = y[r];
    auto dot = [&](std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            s += dir[i] * v[i];
        return s;
    };
    double top = -INFINITY, norm = 0.0;
    for (std::size_t j = 0; j < k; ++j)
        top = std::max(top, dot(others[j]));
    for (double x : dir)
        norm += std::abs(x);
    if (norm > 0.0 && dot(point) - top > 1e-12 * norm * scale)
        out.direction = std::move(dir);
    return out;
}

} // namespace credal
