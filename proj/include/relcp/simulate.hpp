#pragma once

/// @file
/// Monte Carlo generator for functional series with planted mean changes.
///
/// Segment means are 20 (sin 2 pi t + cos 2 pi t) plus a multiple of a
/// localized bump on [0, 0.16]; errors follow a functional MA(1) process
/// eps_j = eta_j + Theta eta_{j-1} on a 21-dimensional cubic B-spline space.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "relcp/fda_core.hpp"
#include "relcp/spline.hpp"

namespace relcp {

namespace detail {

inline const NaturalCubicSpline& bump_spline() {
    // Listed points, their mirror images about t = 0.085, and zero anchors
    // at 0 and at the mirror image of 0.
    static const NaturalCubicSpline spline = [] {
        const std::vector<double> xs{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08};
        const std::vector<double> ys{2, 5, 9, 10, 12, 15, 22, 25};
        std::vector<double> kx{0.0};
        std::vector<double> ky{0.0};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            kx.push_back(xs[i]);
            ky.push_back(ys[i]);
        }
        for (std::size_t i = xs.size(); i-- > 0;) {
            kx.push_back(std::round((0.17 - xs[i]) * 100.0) / 100.0);
            ky.push_back(ys[i]);
        }
        kx.push_back(0.17);
        ky.push_back(0.0);
        return NaturalCubicSpline(kx, ky);
    }();
    return spline;
}

}  // namespace detail

inline constexpr double kBumpSupportEnd = 0.16;

/// Symmetric cubic bump, zero outside [0, 0.16].
[[nodiscard]] inline double bump_delta_j(double t) {
    if (t < 0.0 || t > kBumpSupportEnd) {
        return 0.0;
    }
    return detail::bump_spline()(t);
}

[[nodiscard]] inline double base_mean(double t) {
    return 20.0 * (std::sin(2.0 * std::numbers::pi * t) + std::cos(2.0 * std::numbers::pi * t));
}

/// base + level * bump.
[[nodiscard]] inline double mean_with_level(double level, double t) { return base_mean(t) + level * bump_delta_j(t); }

/// Segment means mu_1..mu_4 of the two- and three-change designs:
/// bump multiples 0, 1, 2, 1.
[[nodiscard]] inline double scenario_mean(int label, double t) {
    static constexpr double levels[] = {0.0, 1.0, 2.0, 1.0};
    if (label < 1 || label > 4) {
        throw std::invalid_argument("scenario_mean: unknown segment label mu" + std::to_string(label));
    }
    return mean_with_level(levels[label - 1], t);
}

struct FmaParams {
    std::size_t basis_dim = 21;
    double theta_norm = 0.8;
    double truncation = 4.0;
    /// Multiplies the generated errors; 0 gives noiseless series.
    double noise_scale = 1.0;
};

/// Operator and basis of one fMA(1) scenario. `theta` acts on basis
/// coefficients (row-major dim x dim); `basis` holds nu_i(t_g) as
/// row-major p x dim.
struct FmaProcess {
    std::size_t dim = 0;
    std::vector<double> theta;
    std::vector<double> basis;
    std::size_t grid_size = 0;

    [[nodiscard]] std::vector<double> apply_theta(std::span<const double> coef) const {
        std::vector<double> out(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                out[i] += theta[i * dim + j] * coef[j];
            }
        }
        return out;
    }

    [[nodiscard]] std::vector<double> to_grid(std::span<const double> coef) const {
        std::vector<double> out(grid_size, 0.0);
        for (std::size_t g = 0; g < grid_size; ++g) {
            for (std::size_t i = 0; i < dim; ++i) {
                out[g] += basis[g * dim + i] * coef[i];
            }
        }
        return out;
    }
};

/// Largest singular value of a row-major rows x cols matrix by power
/// iteration on A^T A, to `tol` relative change.
[[nodiscard]] inline double spectral_norm(std::span<const double> a, std::size_t rows, std::size_t cols,
                                          double tol = 1e-12) {
    if (a.size() != rows * cols || rows == 0 || cols == 0) {
        throw std::invalid_argument("spectral_norm: shape mismatch");
    }
    std::vector<double> v(cols, 1.0 / std::sqrt(static_cast<double>(cols)));
    std::vector<double> av(rows);
    std::vector<double> w(cols);
    double lambda = 0.0;
    for (int iter = 0; iter < 100000; ++iter) {
        for (std::size_t i = 0; i < rows; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) {
                s += a[i * cols + j] * v[j];
            }
            av[i] = s;
        }
        for (std::size_t j = 0; j < cols; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < rows; ++i) {
                s += a[i * cols + j] * av[i];
            }
            w[j] = s;
        }
        double norm = 0.0;
        for (double x : w) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            return 0.0;
        }
        for (std::size_t j = 0; j < cols; ++j) {
            v[j] = w[j] / norm;
        }
        const double prev = lambda;
        lambda = norm;
        if (iter > 0 && std::abs(lambda - prev) <= tol * lambda) {
            break;
        }
    }
    return std::sqrt(lambda);
}

/// Coefficient of eta: a normal with variance 1/i^2, zeroed when it leaves
/// [-truncation, truncation].
[[nodiscard]] inline double truncated_coefficient(double standard_normal, std::size_t i, double truncation) {
    const double v = standard_normal / static_cast<double>(i);
    return std::abs(v) <= truncation ? v : 0.0;
}

/// Draws Psi with sd(Psi_ij) = 1/(ij) and scales it to spectral norm
/// theta_norm; evaluates the basis on the grid.
template <class NormalSource>
[[nodiscard]] FmaProcess make_fma_process(const Grid& grid, const FmaParams& params, NormalSource& normal) {
    FmaProcess proc;
    proc.dim = params.basis_dim;
    proc.grid_size = grid.size();
    const std::size_t dim = proc.dim;
    proc.theta.resize(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            proc.theta[i * dim + j] = normal() / static_cast<double>((i + 1) * (j + 1));
        }
    }
    const double sigma = spectral_norm(proc.theta, dim, dim);
    if (sigma > 0.0) {
        for (double& v : proc.theta) {
            v *= params.theta_norm / sigma;
        }
    }
    const BSplineBasis basis(dim);
    proc.basis.resize(grid.size() * dim);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto vals = basis.evaluate(grid[g]);
        std::copy(vals.begin(), vals.end(), proc.basis.begin() + static_cast<std::ptrdiff_t>(g * dim));
    }
    return proc;
}

/// n fMA(1) error curves from an explicit normal source. The source is
/// consumed as: dim^2 entries of Psi, then dim coefficients of eta_0, eta_1,
/// ..., eta_n.
template <class NormalSource>
[[nodiscard]] std::vector<Curve> gen_fma1_from(std::size_t n, const Grid& grid, const FmaParams& params,
                                               NormalSource& normal, FmaProcess* process_out = nullptr) {
    const FmaProcess proc = make_fma_process(grid, params, normal);
    const std::size_t dim = proc.dim;
    auto draw_eta = [&] {
        std::vector<double> c(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            c[i] = truncated_coefficient(normal(), i + 1, params.truncation);
        }
        return c;
    };
    std::vector<Curve> out;
    out.reserve(n);
    std::vector<double> prev = draw_eta();
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> cur = draw_eta();
        auto coef = proc.apply_theta(prev);
        for (std::size_t i = 0; i < dim; ++i) {
            coef[i] += cur[i];
        }
        auto vals = proc.to_grid(coef);
        for (double& v : vals) {
            v *= params.noise_scale;
        }
        out.emplace_back(std::move(vals));
        prev = std::move(cur);
    }
    if (process_out != nullptr) {
        *process_out = proc;
    }
    return out;
}

/// Seeded std::mt19937_64 standard normal source.
class SeededNormal {
public:
    explicit SeededNormal(std::uint64_t seed) : eng_(seed) {}
    double operator()() { return dist_(eng_); }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

[[nodiscard]] inline std::vector<Curve> gen_fma1(std::size_t n, const Grid& grid, const FmaParams& params,
                                                 std::uint64_t seed, FmaProcess* process_out = nullptr) {
    SeededNormal normal(seed);
    return gen_fma1_from(n, grid, params, normal, process_out);
}

struct Fraction {
    std::size_t num = 0;
    std::size_t den = 1;

    [[nodiscard]] std::size_t floor_times(std::size_t n) const { return n * num / den; }
    [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct SimScenario {
    std::size_t n = 300;
    std::vector<Fraction> change_fractions;
    /// Bump multiple of each of the m+1 segment means.
    std::vector<double> levels;
    Grid grid = Grid::uniform(100);
    std::uint64_t seed = 0;

    void validate() const {
        if (levels.size() != change_fractions.size() + 1) {
            throw std::invalid_argument("SimScenario: need one mean per segment");
        }
        double prev = 0.0;
        for (const auto& f : change_fractions) {
            if (f.den == 0 || !(f.value() > prev && f.value() < 1.0)) {
                throw std::invalid_argument("SimScenario: change fractions must increase strictly inside (0, 1)");
            }
            prev = f.value();
        }
        if (n < 2) {
            throw std::invalid_argument("SimScenario: n must be >= 2");
        }
    }

    /// Planted change indices floor(n * fraction).
    [[nodiscard]] std::vector<std::size_t> change_indices() const {
        std::vector<std::size_t> out;
        for (const auto& f : change_fractions) {
            out.push_back(f.floor_times(n));
        }
        return out;
    }

    /// Two changes at n/3 and 2n/3 with means mu_1, mu_2, mu_3.
    static SimScenario two_change(std::size_t n, std::uint64_t seed, Grid grid = Grid::uniform(100)) {
        return {n, {{1, 3}, {2, 3}}, {0.0, 1.0, 2.0}, std::move(grid), seed};
    }

    /// Three changes at n/4, 2n/4, 3n/4 with means mu_1, mu_2, mu_3, mu_4.
    static SimScenario three_change(std::size_t n, std::uint64_t seed, Grid grid = Grid::uniform(100)) {
        return {n, {{1, 4}, {2, 4}, {3, 4}}, {0.0, 1.0, 2.0, 1.0}, std::move(grid), seed};
    }
};

/// Mean schedule plus fMA(1) errors; X_j carries the mean of segment s for
/// floor(n f_{s-1}) < j <= floor(n f_s).
[[nodiscard]] inline FunctionalSeries gen_series(const SimScenario& scn, const FmaParams& params = {}) {
    scn.validate();
    const std::size_t p = scn.grid.size();
    std::vector<std::vector<double>> means;
    for (double level : scn.levels) {
        std::vector<double> mu(p);
        for (std::size_t g = 0; g < p; ++g) {
            mu[g] = mean_with_level(level, scn.grid[g]);
        }
        means.push_back(std::move(mu));
    }
    const auto cuts = scn.change_indices();
    std::vector<double> data(scn.n * p, 0.0);
    if (params.noise_scale != 0.0) {
        const auto eps = gen_fma1(scn.n, scn.grid, params, scn.seed);
        for (std::size_t j = 0; j < scn.n; ++j) {
            std::copy(eps[j].values().begin(), eps[j].values().end(),
                      data.begin() + static_cast<std::ptrdiff_t>(j * p));
        }
    }
    std::size_t seg = 0;
    for (std::size_t j = 1; j <= scn.n; ++j) {
        while (seg < cuts.size() && j > cuts[seg]) {
            ++seg;
        }
        for (std::size_t g = 0; g < p; ++g) {
            data[(j - 1) * p + g] += means[seg][g];
        }
    }
    return FunctionalSeries(scn.grid, std::move(data), scn.n);
}

}  // namespace relcp
