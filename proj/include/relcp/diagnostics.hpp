#pragma once

/// @file
/// Lag-k functional autocorrelation surfaces and their L2 aggregation
/// (variogram), used to judge whether serial dependence decays.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "relcp/fda_core.hpp"

namespace relcp {

/// p x p surface over (t, s), row-major. Entries with a zero denominator are
/// NaN and counted in `undefined`.
struct Surface {
    std::size_t p = 0;
    std::vector<double> values;
    std::size_t undefined = 0;

    [[nodiscard]] double at(std::size_t t, std::size_t s) const { return values[t * p + s]; }
    [[nodiscard]] bool defined(std::size_t t, std::size_t s) const { return !std::isnan(at(t, s)); }
    [[nodiscard]] bool fully_defined() const noexcept { return undefined == 0; }
};

namespace detail {

inline std::vector<double> centered(const FunctionalSeries& x) {
    const std::size_t n = x.size();
    const std::size_t p = x.grid_size();
    std::vector<double> mean(p, 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
        auto r = x.row(j);
        for (std::size_t t = 0; t < p; ++t) {
            mean[t] += r[t];
        }
    }
    for (double& m : mean) {
        m /= static_cast<double>(n);
    }
    std::vector<double> c(n * p);
    for (std::size_t j = 1; j <= n; ++j) {
        auto r = x.row(j);
        for (std::size_t t = 0; t < p; ++t) {
            c[(j - 1) * p + t] = r[t] - mean[t];
        }
    }
    return c;
}

inline void check_lag(const FunctionalSeries& x, std::size_t k) {
    if (x.size() < 2 || k + 2 > x.size()) {
        throw std::invalid_argument("autocorrelation: lag " + std::to_string(k) + " exceeds n - 2");
    }
}

}  // namespace detail

/// gamma_k(t, s) = sum_{j<=n-k} Xc_j(t) Xc_{j+k}(s) /
///                 sqrt(sum_{j<=n-k} Xc_j(t)^2 * sum_{j<=n-k} Xc_{j+k}(s)^2),
/// with Xc centered by the global sample mean.
[[nodiscard]] inline Surface autocorr_surface(const FunctionalSeries& x, std::size_t k) {
    detail::check_lag(x, k);
    const std::size_t n = x.size();
    const std::size_t p = x.grid_size();
    const auto c = detail::centered(x);
    std::vector<double> lead(p, 0.0);
    std::vector<double> lag(p, 0.0);
    Surface out{p, std::vector<double>(p * p, 0.0), 0};
    for (std::size_t j = 0; j + k < n; ++j) {
        const double* a = c.data() + j * p;
        const double* b = c.data() + (j + k) * p;
        for (std::size_t t = 0; t < p; ++t) {
            lead[t] += a[t] * a[t];
            lag[t] += b[t] * b[t];
            for (std::size_t s = 0; s < p; ++s) {
                out.values[t * p + s] += a[t] * b[s];
            }
        }
    }
    for (std::size_t t = 0; t < p; ++t) {
        for (std::size_t s = 0; s < p; ++s) {
            const double den = std::sqrt(lead[t] * lag[s]);
            double& v = out.values[t * p + s];
            if (den > 0.0) {
                v /= den;
            } else {
                v = std::numeric_limits<double>::quiet_NaN();
                ++out.undefined;
            }
        }
    }
    return out;
}

/// c_k(t, s) = (1/n) sum_{j<=n-k} Xc_j(t) Xc_{j+k}(s).
[[nodiscard]] inline Surface autocov_surface(const FunctionalSeries& x, std::size_t k) {
    detail::check_lag(x, k);
    const std::size_t n = x.size();
    const std::size_t p = x.grid_size();
    const auto c = detail::centered(x);
    Surface out{p, std::vector<double>(p * p, 0.0), 0};
    for (std::size_t j = 0; j + k < n; ++j) {
        const double* a = c.data() + j * p;
        const double* b = c.data() + (j + k) * p;
        for (std::size_t t = 0; t < p; ++t) {
            for (std::size_t s = 0; s < p; ++s) {
                out.values[t * p + s] += a[t] * b[s];
            }
        }
    }
    for (double& v : out.values) {
        v /= static_cast<double>(n);
    }
    return out;
}

/// Hilbert-Schmidt norm by the 2-D trapezoid rule; NaN when any entry is
/// undefined.
[[nodiscard]] inline double surface_l2_norm(const Surface& s, const Grid& grid) {
    if (s.p != grid.size()) {
        throw std::invalid_argument("surface_l2_norm: grid mismatch");
    }
    if (!s.fully_defined()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const auto w = grid.weights();
    double acc = 0.0;
    for (std::size_t t = 0; t < s.p; ++t) {
        for (std::size_t u = 0; u < s.p; ++u) {
            const double v = s.at(t, u);
            acc += w[t] * w[u] * v * v;
        }
    }
    return std::sqrt(acc);
}

struct Variogram {
    std::vector<std::size_t> lags;
    /// ||gamma_k||_2 per lag; NaN where the surface is undefined.
    std::vector<double> values;

    [[nodiscard]] bool defined(std::size_t i) const { return !std::isnan(values[i]); }
};

/// Lags 0..max_lag.
[[nodiscard]] inline Variogram variogram(const FunctionalSeries& x, std::size_t max_lag) {
    detail::check_lag(x, max_lag);
    Variogram v;
    for (std::size_t k = 0; k <= max_lag; ++k) {
        v.lags.push_back(k);
        v.values.push_back(surface_l2_norm(autocorr_surface(x, k), x.grid()));
    }
    return v;
}

}  // namespace relcp
