#pragma once

/// @file
/// Relevance testing for d-dimensional functional series (for example hip,
/// knee and ankle angles observed over the same strides).
///
/// Two notions of a relevant change are supported:
///  - per coordinate: coordinate l has its own threshold Delta_l and its own
///    segmentation; detectors of all coordinates are aggregated by a maximum
///    and compared against one bootstrap quantile;
///  - aggregated: the coordinate sup-norm CUSUMs are combined with the
///    q-norm phi(M_1, ..., M_d) before comparison with a single Delta, on a
///    joint segmentation.
/// Multipliers are shared across coordinates within a replicate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "relcp/binseg.hpp"
#include "relcp/relevance.hpp"

namespace relcp {

enum class AggregationMode { per_coordinate, aggregated };

/// ||v||_q for q in [1, inf].
[[nodiscard]] inline double q_norm(std::span<const double> v, double q) {
    if (!(q >= 1.0)) {
        throw std::invalid_argument("q_norm: exponent must be >= 1");
    }
    if (std::isinf(q)) {
        double m = 0.0;
        for (double x : v) {
            m = std::max(m, std::abs(x));
        }
        return m;
    }
    double s = 0.0;
    for (double x : v) {
        s += std::pow(std::abs(x), q);
    }
    return std::pow(s, 1.0 / q);
}

/// Bootstrap counterpart of the q-norm aggregation: ||v_+||_q when some
/// coordinate is positive, else max(v). Upper-bounds phi(M) - phi(a) by
/// ||(M - a)_+||_q; equals v for d = 1 and max(v) for q = inf.
[[nodiscard]] inline double aggregate_replicate(std::span<const double> v, double q) {
    const double top = *std::max_element(v.begin(), v.end());
    if (top <= 0.0 || std::isinf(q)) {
        return top;
    }
    std::vector<double> pos(v.size());
    std::transform(v.begin(), v.end(), pos.begin(), [](double x) { return std::max(x, 0.0); });
    return q_norm(pos, q);
}

struct MultivariateOptions {
    AggregationMode mode = AggregationMode::per_coordinate;
    /// Per-coordinate thresholds (per_coordinate mode).
    std::vector<double> deltas;
    /// Single threshold (aggregated mode).
    double delta = 0.0;
    double q = 2.0;
};

struct MultivariateReport {
    AggregationMode mode = AggregationMode::per_coordinate;
    /// per_coordinate: one report per coordinate, all sharing the quantile
    /// and draws below.
    std::vector<RelevanceReport> coordinates;
    /// aggregated: detectors carry phi(M); segment means and extremal sets
    /// are stacked coordinate after coordinate (index l * p + t).
    RelevanceReport joint;
    double quantile = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> draws;
};

namespace detail {

inline void check_coordinates(std::span<const FunctionalSeries> xs) {
    if (xs.empty()) {
        throw std::invalid_argument("multivariate: no coordinates");
    }
    for (const auto& x : xs) {
        if (x.size() != xs.front().size()) {
            throw std::invalid_argument("multivariate: coordinates have different sample sizes");
        }
    }
}

inline Curve stack_curves(const std::vector<Curve>& parts) {
    std::vector<double> v;
    for (const auto& c : parts) {
        v.insert(v.end(), c.values().begin(), c.values().end());
    }
    return Curve(std::move(v));
}

inline MultivariateReport per_coordinate(std::span<const FunctionalSeries> xs, const MultivariateOptions& opt,
                                         const BootstrapConfig& cfg, std::span<const double> xi,
                                         std::size_t min_seg) {
    const std::size_t d = xs.size();
    if (opt.deltas.size() != d) {
        throw std::invalid_argument("multivariate: need one delta per coordinate");
    }
    if (xi.size() != d && xi.size() != 1) {
        throw std::invalid_argument("multivariate: need one xi per coordinate or a single shared xi");
    }
    MultivariateReport out;
    out.mode = AggregationMode::per_coordinate;
    std::vector<CandidateKernel> kernels;
    for (std::size_t c = 0; c < d; ++c) {
        if (!(opt.deltas[c] >= 0.0)) {
            throw std::invalid_argument("multivariate: delta must be nonnegative");
        }
        const auto cps = binseg(xs[c], xi.size() == 1 ? xi[0] : xi[c], min_seg);
        RelevanceReport rep;
        rep.candidates = cps;
        rep.delta = opt.deltas[c];
        rep.segment_means = segment_means_of(xs[c], cps);
        for (std::size_t i = 1; i <= cps.size(); ++i) {
            rep.detectors.push_back(detector(xs[c], cps, i, opt.deltas[c]));
            kernels.emplace_back(xs[c], cps, i, cfg);
            rep.extremal.push_back(kernels.back().extremal());
        }
        out.coordinates.push_back(std::move(rep));
    }
    if (!kernels.empty()) {
        const std::size_t n = xs.front().size();
        out.draws = run_replicates(cfg.replicates, cfg.workers, [&](std::size_t r) {
            const auto mult = replicate_multipliers(cfg.seed, r, n);
            double m = -std::numeric_limits<double>::infinity();
            for (const auto& k : kernels) {
                m = std::max(m, k.evaluate(mult));
            }
            return m;
        });
        out.quantile = empirical_quantile(out.draws, cfg.alpha);
    }
    for (auto& rep : out.coordinates) {
        rep.quantile = out.quantile;
        rep.bootstrap_draws = out.draws;
        for (const auto& det : rep.detectors) {
            rep.relevant.push_back(det.value > out.quantile);
        }
    }
    return out;
}

inline MultivariateReport aggregated(std::span<const FunctionalSeries> xs, const MultivariateOptions& opt,
                                     const BootstrapConfig& cfg, double xi, std::size_t min_seg) {
    if (!(opt.delta >= 0.0)) {
        throw std::invalid_argument("multivariate: delta must be nonnegative");
    }
    const std::size_t d = xs.size();
    const auto cps = binseg_joint(xs, xi, min_seg);
    MultivariateReport out;
    out.mode = AggregationMode::aggregated;
    RelevanceReport& rep = out.joint;
    rep.candidates = cps;
    rep.delta = opt.delta;
    {
        std::vector<std::vector<Curve>> per(d);
        for (std::size_t c = 0; c < d; ++c) {
            per[c] = segment_means_of(xs[c], cps);
        }
        for (std::size_t s = 0; s <= cps.size(); ++s) {
            std::vector<Curve> parts;
            for (std::size_t c = 0; c < d; ++c) {
                parts.push_back(per[c][s]);
            }
            rep.segment_means.push_back(stack_curves(parts));
        }
    }
    if (cps.empty()) {
        return out;
    }

    std::vector<PrefixSums> sums;
    for (const auto& x : xs) {
        sums.emplace_back(x);
    }
    // kernels[i * d + c]
    std::vector<CandidateKernel> kernels;
    for (std::size_t i = 1; i <= cps.size(); ++i) {
        const std::size_t l = cps.boundary(i - 1);
        const std::size_t r = cps.boundary(i + 1);
        if (r - l < 4) {
            throw std::invalid_argument("multivariate: candidate window shorter than 4");
        }
        std::vector<double> sups(d);
        ExtremalSets stacked;
        for (std::size_t c = 0; c < d; ++c) {
            sups[c] = cusum_supnorm(sums[c], l, r);
            kernels.emplace_back(xs[c], cps, i, cfg);
            const auto& e = kernels.back().extremal();
            const std::size_t off = c * xs[c].grid_size();
            for (auto t : e.plus) {
                stacked.plus.push_back(off + t);
            }
            for (auto t : e.minus) {
                stacked.minus.push_back(off + t);
            }
            stacked.margin = e.margin;
        }
        rep.detectors.push_back(make_detector(i, r - l, attenuation(cps, i), q_norm(sups, opt.q), opt.delta));
        rep.extremal.push_back(std::move(stacked));
    }
    const std::size_t n = xs.front().size();
    const std::size_t m = cps.size();
    out.draws = run_replicates(cfg.replicates, cfg.workers, [&](std::size_t r) {
        const auto mult = replicate_multipliers(cfg.seed, r, n);
        std::vector<double> vals(d);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t c = 0; c < d; ++c) {
                vals[c] = kernels[i * d + c].evaluate(mult);
            }
            best = std::max(best, aggregate_replicate(vals, opt.q));
        }
        return best;
    });
    out.quantile = empirical_quantile(out.draws, cfg.alpha);
    rep.quantile = out.quantile;
    rep.bootstrap_draws = out.draws;
    for (const auto& det : rep.detectors) {
        rep.relevant.push_back(det.value > out.quantile);
    }
    return out;
}

}  // namespace detail

/// `xi` holds one threshold per coordinate (or one shared value) in
/// per_coordinate mode and a single joint threshold in aggregated mode.
[[nodiscard]] inline MultivariateReport detect_relevant_multivariate(std::span<const FunctionalSeries> xs,
                                                                     const MultivariateOptions& opt,
                                                                     const BootstrapConfig& cfg,
                                                                     std::span<const double> xi,
                                                                     std::size_t min_seg) {
    detail::check_coordinates(xs);
    cfg.validate();
    if (opt.mode == AggregationMode::per_coordinate) {
        return detail::per_coordinate(xs, opt, cfg, xi, min_seg);
    }
    if (xi.size() != 1) {
        throw std::invalid_argument("multivariate: aggregated mode takes a single xi");
    }
    if (!(opt.q >= 1.0)) {
        throw std::invalid_argument("multivariate: q must be >= 1");
    }
    return detail::aggregated(xs, opt, cfg, xi[0], min_seg);
}

}  // namespace relcp
