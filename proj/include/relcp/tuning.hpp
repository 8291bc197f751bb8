#pragma once

/// @file
/// Data-driven defaults: relevance threshold from edge means, bootstrap
/// block length, and the stock constants of the procedure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "relcp/diagnostics.hpp"
#include "relcp/fda_core.hpp"

namespace relcp {

enum class BlockStrategy { fixed_exponent, plug_in };

struct TuningDefaults {
    double extremal_c = 0.1;
    double alpha = 0.1;
    std::size_t replicates = 1000;
    BlockStrategy block_strategy = BlockStrategy::fixed_exponent;
    double block_exponent = 0.25;
    double delta_fraction = 1.0 / 3.0;
    double edge_fraction = 0.05;
};

/// fraction * || mean(first m curves) - mean(last m curves) ||_inf with
/// m = floor(edge_fraction * n).
[[nodiscard]] inline double select_delta(const FunctionalSeries& x, double edge_fraction = 0.05,
                                         double fraction = 1.0 / 3.0) {
    if (!(edge_fraction > 0.0 && edge_fraction < 0.5) || !(fraction > 0.0)) {
        throw std::invalid_argument("select_delta: need edge_fraction in (0, 0.5) and fraction > 0");
    }
    const std::size_t n = x.size();
    const auto m = static_cast<std::size_t>(std::floor(edge_fraction * static_cast<double>(n) + 1e-9));
    if (m < 1) {
        throw std::invalid_argument("select_delta: series too short for the edge fraction");
    }
    const Curve first = segment_mean(x, 1, m);
    const Curve last = segment_mean(x, n - m + 1, n);
    double sup = 0.0;
    for (std::size_t t = 0; t < first.size(); ++t) {
        sup = std::max(sup, std::abs(first[t] - last[t]));
    }
    return fraction * sup;
}

namespace detail {

/// Flat-top (trapezoid) lag window: 1 up to |x| = 1/2, linear to 0 at 1.
inline double flat_top_weight(double x) {
    const double a = std::abs(x);
    if (a <= 0.5) {
        return 1.0;
    }
    return a < 1.0 ? 2.0 * (1.0 - a) : 0.0;
}

inline std::size_t clamp_block(double raw, std::size_t lo, std::size_t hi, std::size_t n) {
    auto l = static_cast<std::size_t>(std::max(1.0, std::round(raw)));
    l = std::clamp(l, lo, std::max(lo, hi));
    while (l > 1 && 2 * l + 2 > n) {
        --l;
    }
    return l;
}

}  // namespace detail

/// Plug-in bandwidth for the quadratic spectral kernel built from the
/// lag autocovariance kernels of the centered series:
///
///   L = ( 4 kappa^2 ||C2||^2 / (||C||^2 + (int C(t,t) dt)^2) * n )^(1/5),
///
/// with pilot estimates C = sum_k w(k/h) c_k and C2 = sum_k k^2 w(k/h) c_k
/// under the flat-top window w, pilot bandwidth h = ceil(n^(1/5)) and
/// kappa = 18 pi^2 / 125. Rounded and clamped to [2, floor(n^(2/7))].
[[nodiscard]] inline std::size_t plug_in_block_length(const FunctionalSeries& x) {
    const std::size_t n = x.size();
    const std::size_t p = x.grid_size();
    const double nd = static_cast<double>(n);
    const double pilot = std::ceil(std::pow(nd, 0.2));
    const std::size_t max_lag = std::min<std::size_t>(n - 2, static_cast<std::size_t>(pilot));
    std::vector<double> c(p * p, 0.0);
    std::vector<double> c2(p * p, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        const double w = detail::flat_top_weight(static_cast<double>(k) / pilot);
        const Surface s = autocov_surface(x, k);
        const double kk = static_cast<double>(k) * static_cast<double>(k);
        for (std::size_t t = 0; t < p; ++t) {
            for (std::size_t u = 0; u < p; ++u) {
                // lag k contributes c_k(t, u) and, for k > 0, c_{-k}(t, u) = c_k(u, t).
                double v = s.at(t, u);
                if (k > 0) {
                    v += s.at(u, t);
                }
                c[t * p + u] += w * v;
                c2[t * p + u] += w * kk * v;
            }
        }
    }
    const auto weights = x.grid().weights();
    double norm_c = 0.0;
    double norm_c2 = 0.0;
    double trace = 0.0;
    for (std::size_t t = 0; t < p; ++t) {
        trace += weights[t] * c[t * p + t];
        for (std::size_t u = 0; u < p; ++u) {
            const double ww = weights[t] * weights[u];
            norm_c += ww * c[t * p + u] * c[t * p + u];
            norm_c2 += ww * c2[t * p + u] * c2[t * p + u];
        }
    }
    const auto hi = static_cast<std::size_t>(std::floor(std::pow(nd, 2.0 / 7.0)));
    const double den = norm_c + trace * trace;
    if (!(den > 0.0)) {
        return detail::clamp_block(2.0, 2, hi, n);
    }
    const double kappa = 18.0 * std::numbers::pi * std::numbers::pi / 125.0;
    const double raw = std::pow(4.0 * kappa * kappa * norm_c2 / den * nd, 0.2);
    return detail::clamp_block(raw, 2, hi, n);
}

/// ceil(n^exponent) for the fixed-exponent rule (exponent in [1/5, 2/7]),
/// or the plug-in rule.
[[nodiscard]] inline std::size_t select_block_length(const FunctionalSeries& x,
                                                     BlockStrategy strategy = BlockStrategy::fixed_exponent,
                                                     double exponent = 0.25) {
    const std::size_t n = x.size();
    if (n < 16) {
        throw std::invalid_argument("select_block_length: at least 16 curves required");
    }
    if (strategy == BlockStrategy::plug_in) {
        return plug_in_block_length(x);
    }
    if (exponent < 0.2 - 1e-12 || exponent > 2.0 / 7.0 + 1e-12) {
        throw std::invalid_argument("select_block_length: exponent outside [1/5, 2/7]");
    }
    const double raw = std::ceil(std::pow(static_cast<double>(n), exponent) - 1e-9);
    return detail::clamp_block(raw, 1, n, n);
}

}  // namespace relcp
