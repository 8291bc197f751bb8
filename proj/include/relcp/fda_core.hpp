#pragma once

/// @file
/// Grid-sampled functional data: grids, curves, series, norms and the
/// affine segment maps shared by the segmentation and relevance steps.
///
/// All norms are grid approximations. The sup-norm is the maximum over grid
/// points; the L2 norm uses trapezoid weights over [t_1, t_p].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relcp {

/// Ordered abscissae t_1 < ... < t_p inside [0, 1].
class Grid {
public:
    Grid() = default;

    explicit Grid(std::vector<double> points) : points_(std::move(points)) {
        if (points_.size() < 2) {
            throw std::invalid_argument("Grid: at least 2 points required");
        }
        if (points_.front() < 0.0 || points_.back() > 1.0) {
            throw std::invalid_argument("Grid: points must lie in [0, 1]");
        }
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i] > points_[i - 1])) {
                throw std::invalid_argument("Grid: points must be strictly increasing");
            }
        }
        weights_.assign(points_.size(), 0.0);
        for (std::size_t i = 1; i < points_.size(); ++i) {
            const double half = 0.5 * (points_[i] - points_[i - 1]);
            weights_[i - 1] += half;
            weights_[i] += half;
        }
    }

    /// p equispaced points from 0 to 1 inclusive.
    static Grid uniform(std::size_t p) {
        if (p < 2) {
            throw std::invalid_argument("Grid::uniform: at least 2 points required");
        }
        std::vector<double> pts(p);
        for (std::size_t i = 0; i < p; ++i) {
            pts[i] = static_cast<double>(i) / static_cast<double>(p - 1);
        }
        pts.back() = 1.0;
        return Grid(std::move(pts));
    }

    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
    [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }

    /// Trapezoid quadrature weights; they sum to t_p - t_1.
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

    friend bool operator==(const Grid& a, const Grid& b) { return a.points_ == b.points_; }

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

/// One observed function, sampled on a grid it does not own.
class Curve {
public:
    Curve() = default;

    explicit Curve(std::vector<double> values) : values_(std::move(values)) {
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("Curve: non-finite value");
            }
        }
    }

    static Curve constant(std::size_t p, double value) { return Curve(std::vector<double>(p, value)); }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const Curve& a, const Curve& b) { return a.values_ == b.values_; }

private:
    std::vector<double> values_;
};

/// n curves in temporal order on a shared grid.
///
/// Storage is one contiguous row-major n x p block. The public index
/// convention for sample positions is 1-based (j = 1..n); `curve(j)` and
/// `row(j)` take 1-based indices.
class FunctionalSeries {
public:
    FunctionalSeries() = default;

    FunctionalSeries(Grid grid, std::vector<double> row_major, std::size_t n)
        : grid_(std::move(grid)), data_(std::move(row_major)), n_(n) {
        validate();
    }

    FunctionalSeries(Grid grid, const std::vector<Curve>& curves) : grid_(std::move(grid)), n_(curves.size()) {
        data_.reserve(curves.size() * grid_.size());
        for (const auto& c : curves) {
            if (c.size() != grid_.size()) {
                throw std::invalid_argument("FunctionalSeries: curve length differs from grid size");
            }
            data_.insert(data_.end(), c.values().begin(), c.values().end());
        }
        validate();
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t grid_size() const noexcept { return grid_.size(); }
    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

    /// Values of X_j, 1-based.
    [[nodiscard]] std::span<const double> row(std::size_t j) const {
        if (j < 1 || j > n_) {
            throw std::out_of_range("FunctionalSeries::row: index " + std::to_string(j) + " outside 1.." +
                                    std::to_string(n_));
        }
        return {data_.data() + (j - 1) * grid_.size(), grid_.size()};
    }

    [[nodiscard]] Curve curve(std::size_t j) const {
        auto r = row(j);
        return Curve(std::vector<double>(r.begin(), r.end()));
    }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

private:
    void validate() const {
        if (n_ < 2) {
            throw std::invalid_argument("FunctionalSeries: at least 2 curves required");
        }
        if (data_.size() != n_ * grid_.size()) {
            throw std::invalid_argument("FunctionalSeries: data size is not n * p");
        }
        for (double v : data_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("FunctionalSeries: non-finite value");
            }
        }
    }

    Grid grid_;
    std::vector<double> data_;
    std::size_t n_ = 0;
};

[[nodiscard]] inline double sup_norm(std::span<const double> values) noexcept {
    double m = 0.0;
    for (double v : values) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

[[nodiscard]] inline double sup_norm(const Curve& c) noexcept { return sup_norm(c.values()); }

/// sqrt of the trapezoid approximation of the integral of f^2 over the grid.
[[nodiscard]] inline double l2_norm_squared(std::span<const double> values, const Grid& grid) {
    if (values.size() != grid.size()) {
        throw std::invalid_argument("l2_norm: curve length differs from grid size");
    }
    const auto w = grid.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        s += w[i] * values[i] * values[i];
    }
    return s;
}

[[nodiscard]] inline double l2_norm(std::span<const double> values, const Grid& grid) {
    return std::sqrt(l2_norm_squared(values, grid));
}

[[nodiscard]] inline double l2_norm(const Curve& c, const Grid& grid) { return l2_norm(c.values(), grid); }

/// Pointwise mean of X_from..X_to (1-based, inclusive).
[[nodiscard]] inline Curve segment_mean(const FunctionalSeries& x, std::size_t from, std::size_t to) {
    if (from < 1 || to > x.size()) {
        throw std::out_of_range("segment_mean: window outside 1..n");
    }
    if (from > to) {
        throw std::invalid_argument("segment_mean: empty window");
    }
    const std::size_t p = x.grid_size();
    std::vector<double> acc(p, 0.0);
    for (std::size_t j = from; j <= to; ++j) {
        auto r = x.row(j);
        for (std::size_t t = 0; t < p; ++t) {
            acc[t] += r[t];
        }
    }
    const double inv = 1.0 / static_cast<double>(to - from + 1);
    for (double& v : acc) {
        v *= inv;
    }
    return Curve(std::move(acc));
}

/// Affine map of [lo, hi] onto [0, 1].
class SegmentMap {
public:
    SegmentMap(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
            throw std::invalid_argument("SegmentMap: need 0 <= lo < hi <= 1");
        }
    }

    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }

    [[nodiscard]] double operator()(double s) const {
        if (s < lo_ || s > hi_) {
            throw std::domain_error("SegmentMap: argument outside [lo, hi]");
        }
        if (s == hi_) {
            return 1.0;
        }
        return (s - lo_) / (hi_ - lo_);
    }

    [[nodiscard]] double inverse(double u) const {
        if (u < 0.0 || u > 1.0) {
            throw std::domain_error("SegmentMap::inverse: argument outside [0, 1]");
        }
        return lo_ + u * (hi_ - lo_);
    }

private:
    double lo_;
    double hi_;
};

[[nodiscard]] inline double rescale(const SegmentMap& map, double s) { return map(s); }

}  // namespace relcp
