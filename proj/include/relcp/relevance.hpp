#pragma once

/// @file
/// Relevance testing of segmentation candidates.
///
/// For candidate i with window (k_{i-1}, k_{i+1}] of n_i samples the
/// detector is
///
///   T_{n,i} = sqrt(n_i) * ( M_{n,i} - h_i (1 - h_i) * Delta ),
///
/// where M_{n,i} is the sup-norm of the window CUSUM and h_i the position of
/// k_i inside the window. Its null quantile is approximated by a block
/// multiplier bootstrap on de-jumped residuals, evaluated only on the
/// estimated extremal sets of the mean difference. A candidate is relevant
/// when T_{n,i} exceeds the empirical (1 - alpha) quantile of
/// max_i T_i^{(r)}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "relcp/binseg.hpp"
#include "relcp/cusum.hpp"
#include "relcp/fda_core.hpp"

namespace relcp {

struct BootstrapConfig {
    std::size_t replicates = 1000;
    std::size_t block_length = 1;
    double alpha = 0.1;
    /// Constant in the extremal-set margin c * log(n) / sqrt(n).
    double extremal_c = 0.1;
    std::uint64_t seed = 0;
    /// Worker threads used for replicates; results do not depend on it.
    unsigned workers = 1;

    void validate() const {
        if (replicates < 1) {
            throw std::invalid_argument("BootstrapConfig: replicates must be >= 1");
        }
        if (block_length < 1) {
            throw std::invalid_argument("BootstrapConfig: block length must be >= 1");
        }
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw std::invalid_argument("BootstrapConfig: alpha must lie in (0, 1)");
        }
        if (!(extremal_c > 0.0)) {
            throw std::invalid_argument("BootstrapConfig: extremal constant must be positive");
        }
    }
};

struct Detector {
    /// Candidate number, 1-based.
    std::size_t candidate = 0;
    std::size_t window_length = 0;
    double h_at_change = 0.0;
    double sup_cusum = 0.0;
    double value = 0.0;
};

struct ExtremalSets {
    std::vector<std::size_t> plus;
    std::vector<std::size_t> minus;
    double margin = 0.0;
};

namespace detail {

inline void check_candidate(const ChangePointSet& cps, std::size_t i) {
    if (i < 1 || i > cps.size()) {
        throw std::out_of_range("candidate " + std::to_string(i) + " outside 1.." + std::to_string(cps.size()));
    }
}

inline double attenuation(const ChangePointSet& cps, std::size_t i) {
    const auto l = static_cast<double>(cps.boundary(i - 1));
    const auto k = static_cast<double>(cps.boundary(i));
    const auto r = static_cast<double>(cps.boundary(i + 1));
    return (k - l) / (r - l);
}

inline Detector make_detector(std::size_t i, std::size_t window, double h, double sup_cusum, double delta) {
    return {i, window, h, sup_cusum, std::sqrt(static_cast<double>(window)) * (sup_cusum - h * (1.0 - h) * delta)};
}

}  // namespace detail

/// Detector for candidate i (1-based) against relevance threshold delta.
[[nodiscard]] inline Detector detector(const FunctionalSeries& x, const ChangePointSet& cps, std::size_t i,
                                       double delta) {
    detail::check_candidate(cps, i);
    if (!(delta >= 0.0)) {
        throw std::invalid_argument("detector: delta must be nonnegative");
    }
    const std::size_t l = cps.boundary(i - 1);
    const std::size_t r = cps.boundary(i + 1);
    if (r - l < 4) {
        throw std::invalid_argument("detector: candidate " + std::to_string(i) + " has a window of " +
                                    std::to_string(r - l) + " < 4 observations");
    }
    // Same value as the affine map of [s_{i-1}, s_{i+1}] at s_i, computed on
    // integers to avoid the k/n round trip.
    const double h = detail::attenuation(cps, i);
    const double m = cusum_supnorm(PrefixSums(x), l, r);
    return detail::make_detector(i, r - l, h, m, delta);
}

/// Grid indices where +-(mu1 - mu2) is within c log(n)/sqrt(n) of
/// ||mu1 - mu2||_inf.
[[nodiscard]] inline ExtremalSets extremal_sets(std::span<const double> mu1, std::span<const double> mu2,
                                                std::size_t n, double c) {
    if (mu1.size() != mu2.size()) {
        throw std::invalid_argument("extremal_sets: curves differ in length");
    }
    if (n < 2 || !(c > 0.0)) {
        throw std::invalid_argument("extremal_sets: need n >= 2 and c > 0");
    }
    const auto nd = static_cast<double>(n);
    ExtremalSets out;
    out.margin = c * std::log(nd) / std::sqrt(nd);
    double sup = 0.0;
    for (std::size_t t = 0; t < mu1.size(); ++t) {
        sup = std::max(sup, std::abs(mu1[t] - mu2[t]));
    }
    const double level = sup - out.margin;
    for (std::size_t t = 0; t < mu1.size(); ++t) {
        const double d = mu1[t] - mu2[t];
        if (d >= level) {
            out.plus.push_back(t);
        }
        if (-d >= level) {
            out.minus.push_back(t);
        }
    }
    return out;
}

[[nodiscard]] inline ExtremalSets extremal_sets(const Curve& mu1, const Curve& mu2, std::size_t n, double c) {
    return extremal_sets(mu1.values(), mu2.values(), n, c);
}

/// Standard normal multipliers xi_1..xi_n of replicate r. Each replicate
/// owns an independent stream derived from (seed, r), so replicates can be
/// evaluated in any order.
[[nodiscard]] inline std::vector<double> replicate_multipliers(std::uint64_t seed, std::size_t r, std::size_t n) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::mt19937_64 eng(mix(mix(seed) ^ static_cast<std::uint64_t>(r)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> xi(n);
    for (double& v : xi) {
        v = normal(eng);
    }
    return xi;
}

/// Precomputed block-centered residual sums for one candidate. Evaluating a
/// replicate costs O(n_i * |extremal points|).
class CandidateKernel {
public:
    CandidateKernel(const FunctionalSeries& x, const ChangePointSet& cps, std::size_t i, const BootstrapConfig& cfg) {
        detail::check_candidate(cps, i);
        cfg.validate();
        l_ = cps.boundary(i - 1);
        k_ = cps.boundary(i);
        r_ = cps.boundary(i + 1);
        const std::size_t nh = r_ - l_;
        const std::size_t len = cfg.block_length;
        if (nh < 2 * len + 2) {
            throw std::invalid_argument("bootstrap: candidate " + std::to_string(i) + " (index " +
                                        std::to_string(k_) + ") has a window of " + std::to_string(nh) +
                                        " observations, block length " + std::to_string(len) + " needs at least " +
                                        std::to_string(2 * len + 2));
        }
        h_ = detail::attenuation(cps, i);

        const Curve mu1 = segment_mean(x, l_ + 1, k_);
        const Curve mu2 = segment_mean(x, k_ + 1, r_);
        extremal_ = extremal_sets(mu1, mu2, x.size(), cfg.extremal_c);

        for (std::size_t t : extremal_.plus) {
            columns_.push_back(t);
            signs_.push_back(1.0);
        }
        for (std::size_t t : extremal_.minus) {
            columns_.push_back(t);
            signs_.push_back(-1.0);
        }
        const std::size_t q = columns_.size();

        // Prefix sums over the window of the de-jumped residuals on the
        // selected columns.
        std::vector<double> prefix((nh + 1) * q, 0.0);
        for (std::size_t j = l_ + 1; j <= r_; ++j) {
            auto row = x.row(j);
            const std::size_t pos = j - l_;
            for (std::size_t c = 0; c < q; ++c) {
                const std::size_t t = columns_[c];
                double y = row[t];
                if (j > k_) {
                    y -= mu2[t] - mu1[t];
                }
                prefix[pos * q + c] = prefix[(pos - 1) * q + c] + y;
            }
        }

        const double inv_nh = 1.0 / static_cast<double>(nh);
        blocks_.assign(nh * q, 0.0);
        for (std::size_t start = 0; start < nh; ++start) {
            const std::size_t blen = std::min(len, nh - start);
            const double scale = 1.0 / std::sqrt(static_cast<double>(blen));
            const double share = static_cast<double>(blen) * inv_nh;
            for (std::size_t c = 0; c < q; ++c) {
                const double block = prefix[(start + blen) * q + c] - prefix[start * q + c];
                const double total = prefix[nh * q + c];
                blocks_[start * q + c] = (block - share * total) * scale;
            }
        }
        norm_ = 1.0 / std::sqrt(static_cast<double>(nh));
    }

    [[nodiscard]] std::size_t window_begin() const noexcept { return l_; }
    [[nodiscard]] std::size_t change() const noexcept { return k_; }
    [[nodiscard]] std::size_t window_end() const noexcept { return r_; }
    [[nodiscard]] const ExtremalSets& extremal() const noexcept { return extremal_; }

    /// T_i^{(r)} for multipliers indexed by absolute sample position
    /// (multipliers[j-1] belongs to the block starting at X_j).
    [[nodiscard]] double evaluate(std::span<const double> multipliers) const {
        if (multipliers.size() < r_) {
            throw std::invalid_argument("bootstrap: multiplier vector shorter than the candidate window end");
        }
        const std::size_t q = columns_.size();
        std::vector<double> at_change(q, 0.0);
        std::vector<double> at_end(q, 0.0);
        const std::size_t split = k_ - l_;
        const std::size_t nh = r_ - l_;
        for (std::size_t start = 0; start < nh; ++start) {
            const double w = multipliers[l_ + start];
            const double* z = blocks_.data() + start * q;
            for (std::size_t c = 0; c < q; ++c) {
                at_end[c] += z[c] * w;
            }
            if (start + 1 == split) {
                at_change = at_end;
            }
        }
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < q; ++c) {
            const double w = norm_ * (at_change[c] - h_ * at_end[c]);
            best = std::max(best, signs_[c] * w);
        }
        return best;
    }

private:
    std::size_t l_ = 0;
    std::size_t k_ = 0;
    std::size_t r_ = 0;
    double h_ = 0.0;
    double norm_ = 0.0;
    ExtremalSets extremal_;
    std::vector<std::size_t> columns_;
    std::vector<double> signs_;
    std::vector<double> blocks_;
};

/// One bootstrap statistic T_i^{(r)} for candidate i given its multipliers.
[[nodiscard]] inline double bootstrap_replicate(const FunctionalSeries& x, const ChangePointSet& cps, std::size_t i,
                                                const BootstrapConfig& cfg, std::span<const double> multipliers) {
    return CandidateKernel(x, cps, i, cfg).evaluate(multipliers);
}

/// ceil((1 - alpha) R)-th order statistic of the draws.
[[nodiscard]] inline double empirical_quantile(std::vector<double> draws, double alpha) {
    if (draws.empty()) {
        throw std::invalid_argument("empirical_quantile: no draws");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("empirical_quantile: alpha must lie in (0, 1)");
    }
    const auto count = static_cast<double>(draws.size());
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * count - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, draws.size());
    std::nth_element(draws.begin(), draws.begin() + static_cast<std::ptrdiff_t>(rank - 1), draws.end());
    return draws[rank - 1];
}

/// Runs fn(r) for r = 0..count-1 over `workers` threads and collects the
/// results in replicate order.
template <class Fn>
[[nodiscard]] std::vector<double> run_replicates(std::size_t count, unsigned workers, Fn fn) {
    std::vector<double> out(count);
    const std::size_t nthreads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (nthreads == 1) {
        for (std::size_t r = 0; r < count; ++r) {
            out[r] = fn(r);
        }
        return out;
    }
    std::vector<std::exception_ptr> errors(nthreads);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t r = w; r < count; r += nthreads) {
                    out[r] = fn(r);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

struct BootstrapResult {
    double quantile = 0.0;
    std::vector<double> draws;
};

/// Draws T_n^{*,(r)} = max_i T_i^{(r)} for r = 1..R and their quantile.
/// Delta does not enter the bootstrap; it is accepted for symmetry with the
/// detector.
[[nodiscard]] inline BootstrapResult bootstrap_quantile(const FunctionalSeries& x, const ChangePointSet& cps,
                                                        double /*delta*/, const BootstrapConfig& cfg) {
    if (cps.empty()) {
        throw std::invalid_argument("bootstrap_quantile: no candidates");
    }
    cfg.validate();
    std::vector<CandidateKernel> kernels;
    kernels.reserve(cps.size());
    for (std::size_t i = 1; i <= cps.size(); ++i) {
        kernels.emplace_back(x, cps, i, cfg);
    }
    const std::size_t n = x.size();
    BootstrapResult res;
    res.draws = run_replicates(cfg.replicates, cfg.workers, [&](std::size_t r) {
        const auto xi = replicate_multipliers(cfg.seed, r, n);
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& k : kernels) {
            m = std::max(m, k.evaluate(xi));
        }
        return m;
    });
    res.quantile = empirical_quantile(res.draws, cfg.alpha);
    return res;
}

struct RelevanceReport {
    ChangePointSet candidates;
    std::vector<Detector> detectors;
    double quantile = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> bootstrap_draws;
    std::vector<bool> relevant;
    /// Means of the m+1 segments (k_{i-1}, k_i].
    std::vector<Curve> segment_means;
    std::vector<ExtremalSets> extremal;
    double delta = 0.0;

    [[nodiscard]] std::vector<std::size_t> relevant_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < relevant.size(); ++i) {
            if (relevant[i]) {
                out.push_back(candidates.indices()[i]);
            }
        }
        return out;
    }
};

namespace detail {

inline std::vector<Curve> segment_means_of(const FunctionalSeries& x, const ChangePointSet& cps) {
    std::vector<Curve> means;
    for (std::size_t i = 1; i <= cps.size() + 1; ++i) {
        means.push_back(segment_mean(x, cps.boundary(i - 1) + 1, cps.boundary(i)));
    }
    return means;
}

}  // namespace detail

/// Step 2 on a given candidate set.
[[nodiscard]] inline RelevanceReport assess_candidates(const FunctionalSeries& x, const ChangePointSet& cps,
                                                       double delta, const BootstrapConfig& cfg) {
    if (cps.series_length() != x.size()) {
        throw std::invalid_argument("assess_candidates: candidate set belongs to a series of different length");
    }
    RelevanceReport rep;
    rep.candidates = cps;
    rep.delta = delta;
    rep.segment_means = detail::segment_means_of(x, cps);
    if (cps.empty()) {
        return rep;
    }
    for (std::size_t i = 1; i <= cps.size(); ++i) {
        rep.detectors.push_back(detector(x, cps, i, delta));
    }
    auto boot = bootstrap_quantile(x, cps, delta, cfg);
    rep.quantile = boot.quantile;
    rep.bootstrap_draws = std::move(boot.draws);
    for (std::size_t i = 1; i <= cps.size(); ++i) {
        const Curve mu1 = segment_mean(x, cps.boundary(i - 1) + 1, cps.boundary(i));
        const Curve mu2 = segment_mean(x, cps.boundary(i) + 1, cps.boundary(i + 1));
        rep.extremal.push_back(extremal_sets(mu1, mu2, x.size(), cfg.extremal_c));
        rep.relevant.push_back(rep.detectors[i - 1].value > rep.quantile);
    }
    return rep;
}

/// Segmentation followed by relevance testing. With no candidates the
/// bootstrap is skipped and the relevant set is empty.
[[nodiscard]] inline RelevanceReport detect_relevant(const FunctionalSeries& x, double delta,
                                                     const BootstrapConfig& cfg, double xi, std::size_t min_seg) {
    cfg.validate();
    if (!(delta >= 0.0)) {
        throw std::invalid_argument("detect_relevant: delta must be nonnegative");
    }
    return assess_candidates(x, binseg(x, xi, min_seg), delta, cfg);
}

/// Convenience overload with the segment floor L + 1, so every candidate
/// window holds at least 2L + 2 curves.
[[nodiscard]] inline RelevanceReport detect_relevant(const FunctionalSeries& x, double delta,
                                                     const BootstrapConfig& cfg, double xi) {
    return detect_relevant(x, delta, cfg, xi, cfg.block_length + 1);
}

}  // namespace relcp
