#pragma once

/// @file
/// Functional CUSUM process evaluated at the discrete arguments s = k/n:
///
///   U_{l,r}(k/n, t) = 1/(r-l) * ( sum_{j=l+1}^{k} X_j(t) - (k-l)/(r-l) * sum_{j=l+1}^{r} X_j(t) )
///
/// for k = l+1..r. The interpolation term between grid arguments vanishes
/// there and is not evaluated.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "relcp/fda_core.hpp"

namespace relcp {

/// Column-wise prefix sums S_k(t) = sum_{j<=k} X_j(t), k = 0..n, with
/// Neumaier-compensated accumulation.
class PrefixSums {
public:
    explicit PrefixSums(const FunctionalSeries& x) : n_(x.size()), p_(x.grid_size()), sums_((n_ + 1) * p_, 0.0) {
        std::vector<double> sum(p_, 0.0);
        std::vector<double> comp(p_, 0.0);
        for (std::size_t j = 1; j <= n_; ++j) {
            auto r = x.row(j);
            double* out = sums_.data() + j * p_;
            for (std::size_t t = 0; t < p_; ++t) {
                const double v = r[t];
                const double s = sum[t] + v;
                if (std::abs(sum[t]) >= std::abs(v)) {
                    comp[t] += (sum[t] - s) + v;
                } else {
                    comp[t] += (v - s) + sum[t];
                }
                sum[t] = s;
                out[t] = s + comp[t];
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t grid_size() const noexcept { return p_; }

    /// S_k for k = 0..n.
    [[nodiscard]] std::span<const double> at(std::size_t k) const { return {sums_.data() + k * p_, p_}; }

private:
    std::size_t n_;
    std::size_t p_;
    std::vector<double> sums_;
};

/// Rows k = l+1..r of U_{l,r}(k/n, .) as an (r-l) x p row-major matrix.
struct CusumEvaluation {
    std::size_t l = 0;
    std::size_t r = 0;
    std::size_t p = 0;
    std::vector<double> values;

    /// Row for sample index k in l+1..r.
    [[nodiscard]] std::span<const double> row(std::size_t k) const {
        if (k <= l || k > r) {
            throw std::out_of_range("CusumEvaluation::row: k outside (l, r]");
        }
        return {values.data() + (k - l - 1) * p, p};
    }
};

namespace detail {

inline void check_window(std::size_t n, std::size_t l, std::size_t r) {
    if (r > n || l >= r) {
        throw std::invalid_argument("cusum: need 0 <= l < r <= n (got l=" + std::to_string(l) +
                                    ", r=" + std::to_string(r) + ", n=" + std::to_string(n) + ")");
    }
    if (r - l < 2) {
        throw std::invalid_argument("cusum: window shorter than 2");
    }
}

/// Writes U_{l,r}(k/n, .) into out.
inline void cusum_row(const PrefixSums& ps, std::size_t l, std::size_t r, std::size_t k, std::span<double> out) {
    const auto sl = ps.at(l);
    const auto sk = ps.at(k);
    const auto sr = ps.at(r);
    const double width = static_cast<double>(r - l);
    const double frac = static_cast<double>(k - l) / width;
    for (std::size_t t = 0; t < out.size(); ++t) {
        out[t] = ((sk[t] - sl[t]) - frac * (sr[t] - sl[t])) / width;
    }
}

}  // namespace detail

[[nodiscard]] inline CusumEvaluation cusum(const PrefixSums& ps, std::size_t l, std::size_t r) {
    detail::check_window(ps.size(), l, r);
    CusumEvaluation ev{l, r, ps.grid_size(), std::vector<double>((r - l) * ps.grid_size())};
    for (std::size_t k = l + 1; k <= r; ++k) {
        detail::cusum_row(ps, l, r, k, {ev.values.data() + (k - l - 1) * ev.p, ev.p});
    }
    return ev;
}

[[nodiscard]] inline CusumEvaluation cusum(const FunctionalSeries& x, std::size_t l, std::size_t r) {
    return cusum(PrefixSums(x), l, r);
}

/// Location and size of the largest CUSUM row in L2 norm.
struct CusumMax {
    std::size_t k = 0;
    /// max_k ||U_{l,r}(k/n, .)||_2
    double norm = 0.0;
};

/// Relative margin a later index must beat the incumbent by to replace it.
inline constexpr double kArgmaxTieTolerance = 1e-12;

/// Argmax over k in {l+margin, ..., r-margin} of the summed squared L2 norms
/// of the CUSUM rows of every series in `coords` (one entry for univariate
/// data). Ties resolve to the smallest k.
[[nodiscard]] inline CusumMax cusum_argmax_l2_joint(std::span<const PrefixSums* const> coords,
                                                    std::span<const Grid* const> grids, std::size_t l, std::size_t r,
                                                    std::size_t margin = 1) {
    if (coords.empty() || coords.size() != grids.size()) {
        throw std::invalid_argument("cusum_argmax_l2: coordinate list mismatch");
    }
    detail::check_window(coords.front()->size(), l, r);
    if (margin < 1 || r - l < 2 * margin) {
        throw std::invalid_argument("cusum_argmax_l2: window too short for the segment margin");
    }
    CusumMax best{l + margin, -1.0};
    std::vector<double> buf;
    for (std::size_t k = l + margin; k <= r - margin; ++k) {
        double sq = 0.0;
        for (std::size_t c = 0; c < coords.size(); ++c) {
            buf.resize(coords[c]->grid_size());
            detail::cusum_row(*coords[c], l, r, k, buf);
            sq += l2_norm_squared(buf, *grids[c]);
        }
        const double norm = std::sqrt(sq);
        if (best.norm < 0.0 || norm > best.norm * (1.0 + kArgmaxTieTolerance) + 1e-300) {
            best = {k, norm};
        }
    }
    return best;
}

/// Argmax over k in {l+1, ..., r-1} of ||U_{l,r}(k/n, .)||_2; ties go to the
/// smallest k.
[[nodiscard]] inline CusumMax cusum_argmax_l2(const FunctionalSeries& x, std::size_t l, std::size_t r) {
    const PrefixSums ps(x);
    const PrefixSums* coords[] = {&ps};
    const Grid* grids[] = {&x.grid()};
    return cusum_argmax_l2_joint(coords, grids, l, r, 1);
}

/// max over rows k' = l+1..r and grid points of |U_{l,r}(k'/n, t)|.
[[nodiscard]] inline double cusum_supnorm(const PrefixSums& ps, std::size_t l, std::size_t r) {
    detail::check_window(ps.size(), l, r);
    std::vector<double> buf(ps.grid_size());
    double m = 0.0;
    for (std::size_t k = l + 1; k <= r; ++k) {
        detail::cusum_row(ps, l, r, k, buf);
        m = std::max(m, sup_norm(buf));
    }
    return m;
}

/// Sup-norm of the whole window CUSUM for the candidate k (l < k < r).
[[nodiscard]] inline double cusum_supnorm_at(const FunctionalSeries& x, std::size_t l, std::size_t r,
                                             std::size_t k) {
    detail::check_window(x.size(), l, r);
    if (k <= l || k >= r) {
        throw std::invalid_argument("cusum_supnorm_at: candidate outside (l, r)");
    }
    return cusum_supnorm(PrefixSums(x), l, r);
}

}  // namespace relcp
