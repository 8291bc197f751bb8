#pragma once

/// @file
/// Binary segmentation over the functional CUSUM.
///
/// A window (l, r] is split at the L2-argmax k of its CUSUM rows when the
/// scaled statistic sqrt(r-l) * ||U_{l,r}(k/n, .)||_2 exceeds xi_n; the
/// children are (l, k] and (k, r]. Windows are processed from an explicit
/// work stack and the detected indices are returned sorted.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "relcp/cusum.hpp"
#include "relcp/fda_core.hpp"

namespace relcp {

/// Ordered candidate change points k_1 < ... < k_m (1-based sample indices).
class ChangePointSet {
public:
    ChangePointSet() = default;

    ChangePointSet(std::size_t n, std::vector<std::size_t> indices, double threshold_used = 0.0)
        : n_(n), indices_(std::move(indices)), threshold_(threshold_used) {
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            if (indices_[i] < 1 || indices_[i] >= n_) {
                throw std::invalid_argument("ChangePointSet: index outside [1, n)");
            }
            if (i > 0 && indices_[i] <= indices_[i - 1]) {
                throw std::invalid_argument("ChangePointSet: indices must be strictly increasing");
            }
        }
    }

    [[nodiscard]] std::size_t series_length() const noexcept { return n_; }
    [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
    [[nodiscard]] bool empty() const noexcept { return indices_.empty(); }
    [[nodiscard]] std::span<const std::size_t> indices() const noexcept { return indices_; }
    [[nodiscard]] double threshold_used() const noexcept { return threshold_; }

    /// k_i with sentinels k_0 = 0 and k_{m+1} = n.
    [[nodiscard]] std::size_t boundary(std::size_t i) const {
        if (i == 0) {
            return 0;
        }
        if (i == indices_.size() + 1) {
            return n_;
        }
        if (i > indices_.size() + 1) {
            throw std::out_of_range("ChangePointSet::boundary: index past sentinel");
        }
        return indices_[i - 1];
    }

    /// s_i = k_i / n with sentinels s_0 = 0 and s_{m+1} = 1.
    [[nodiscard]] double scaled(std::size_t i) const {
        return static_cast<double>(boundary(i)) / static_cast<double>(n_);
    }

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> indices_;
    double threshold_ = 0.0;
};

/// Joint segmentation of coordinate series sharing the sample index; the
/// squared L2 norms of the coordinate CUSUM rows are summed.
[[nodiscard]] inline ChangePointSet binseg_joint(std::span<const FunctionalSeries> coords, double xi_n,
                                                 std::size_t min_seg = 1) {
    if (coords.empty()) {
        throw std::invalid_argument("binseg: no series");
    }
    const std::size_t n = coords.front().size();
    for (const auto& c : coords) {
        if (c.size() != n) {
            throw std::invalid_argument("binseg: coordinate series differ in length");
        }
    }
    if (min_seg < 1) {
        throw std::invalid_argument("binseg: min_seg must be positive");
    }
    if (n < 2 * min_seg) {
        throw std::invalid_argument("binseg: series shorter than 2 * min_seg");
    }
    if (!(xi_n >= 0.0)) {
        throw std::invalid_argument("binseg: threshold must be nonnegative");
    }

    std::vector<PrefixSums> sums;
    sums.reserve(coords.size());
    std::vector<const PrefixSums*> sum_ptrs;
    std::vector<const Grid*> grid_ptrs;
    for (const auto& c : coords) {
        sums.emplace_back(c);
    }
    for (std::size_t i = 0; i < coords.size(); ++i) {
        sum_ptrs.push_back(&sums[i]);
        grid_ptrs.push_back(&coords[i].grid());
    }

    std::vector<std::size_t> found;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n}};
    while (!stack.empty()) {
        const auto [l, r] = stack.back();
        stack.pop_back();
        if (r - l < 2 * min_seg || r - l < 2) {
            continue;
        }
        const CusumMax best = cusum_argmax_l2_joint(sum_ptrs, grid_ptrs, l, r, min_seg);
        const double stat = std::sqrt(static_cast<double>(r - l)) * best.norm;
        if (stat > xi_n) {
            found.push_back(best.k);
            stack.emplace_back(best.k, r);
            stack.emplace_back(l, best.k);
        }
    }
    std::sort(found.begin(), found.end());
    return ChangePointSet(n, std::move(found), xi_n);
}

[[nodiscard]] inline ChangePointSet binseg(const FunctionalSeries& x, double xi_n, std::size_t min_seg = 1) {
    return binseg_joint(std::span<const FunctionalSeries>(&x, 1), xi_n, min_seg);
}

namespace detail {

inline double lower_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

}  // namespace detail

/// sigma_n^2 = median of ||X_{j+1} - X_j||_2^2 / 2 over consecutive pairs;
/// for an even count the lower-middle order statistic is used. Squared
/// norms of coordinate series are summed.
[[nodiscard]] inline double difference_variance_joint(std::span<const FunctionalSeries> coords) {
    if (coords.empty()) {
        throw std::invalid_argument("default_xi: no series");
    }
    const std::size_t n = coords.front().size();
    if (n < 3) {
        throw std::invalid_argument("default_xi: at least 3 curves required");
    }
    std::vector<double> halves(n - 1, 0.0);
    for (const auto& x : coords) {
        if (x.size() != n) {
            throw std::invalid_argument("default_xi: coordinate series differ in length");
        }
        std::vector<double> diff(x.grid_size());
        for (std::size_t j = 1; j < n; ++j) {
            auto a = x.row(j);
            auto b = x.row(j + 1);
            for (std::size_t t = 0; t < diff.size(); ++t) {
                diff[t] = b[t] - a[t];
            }
            halves[j - 1] += 0.5 * l2_norm_squared(diff, x.grid());
        }
    }
    return detail::lower_median(std::move(halves));
}

/// xi_n = sigma_n * sqrt(3 log n).
[[nodiscard]] inline double default_xi_joint(std::span<const FunctionalSeries> coords) {
    const double var = difference_variance_joint(coords);
    const double n = static_cast<double>(coords.front().size());
    return std::sqrt(var) * std::sqrt(3.0 * std::log(n));
}

[[nodiscard]] inline double default_xi(const FunctionalSeries& x) {
    return default_xi_joint(std::span<const FunctionalSeries>(&x, 1));
}

}  // namespace relcp
