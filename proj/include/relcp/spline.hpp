#pragma once

/// @file
/// Natural cubic interpolating splines and clamped uniform B-spline bases.

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace relcp {

/// Natural cubic spline through (x_i, y_i) with zero second derivative at
/// both ends. Evaluation outside [x_0, x_n] extends the end cubics.
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 3 || y_.size() != n) {
            throw std::invalid_argument("NaturalCubicSpline: need at least 3 matching knots");
        }
        for (std::size_t i = 1; i < n; ++i) {
            if (!(x_[i] > x_[i - 1])) {
                throw std::invalid_argument("NaturalCubicSpline: knots must be strictly increasing");
            }
        }
        // Tridiagonal system for the interior second derivatives (Thomas).
        m_.assign(n, 0.0);
        std::vector<double> diag(n, 0.0);
        std::vector<double> rhs(n, 0.0);
        std::vector<double> upper(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
            if (i > 1) {
                const double lower = h0;
                const double w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
            if (i == 1) {
                break;
            }
        }
    }

    [[nodiscard]] double operator()(double t) const {
        const std::size_t n = x_.size();
        std::size_t seg = 0;
        if (t >= x_[n - 1]) {
            seg = n - 2;
        } else if (t > x_[0]) {
            seg = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
        }
        const double h = x_[seg + 1] - x_[seg];
        const double a = (x_[seg + 1] - t) / h;
        const double b = (t - x_[seg]) / h;
        return a * y_[seg] + b * y_[seg + 1] +
               ((a * a * a - a) * m_[seg] + (b * b * b - b) * m_[seg + 1]) * h * h / 6.0;
    }

    [[nodiscard]] std::span<const double> knots() const noexcept { return x_; }
    [[nodiscard]] std::span<const double> second_derivatives() const noexcept { return m_; }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

/// Clamped B-spline basis of the given degree with uniform interior knots
/// on [0, 1]; `dimension` = number of basis functions.
class BSplineBasis {
public:
    BSplineBasis(std::size_t dimension, std::size_t degree = 3) : dim_(dimension), degree_(degree) {
        if (dimension < degree + 1) {
            throw std::invalid_argument("BSplineBasis: dimension must exceed the degree");
        }
        const std::size_t interior = dimension - degree - 1;
        knots_.assign(degree + 1, 0.0);
        for (std::size_t k = 1; k <= interior; ++k) {
            knots_.push_back(static_cast<double>(k) / static_cast<double>(interior + 1));
        }
        knots_.insert(knots_.end(), degree + 1, 1.0);
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
    [[nodiscard]] std::span<const double> knots() const noexcept { return knots_; }

    /// Values of all basis functions at t in [0, 1] (Cox-de Boor).
    [[nodiscard]] std::vector<double> evaluate(double t) const {
        if (t < 0.0 || t > 1.0) {
            throw std::domain_error("BSplineBasis: t outside [0, 1]");
        }
        const std::size_t nk = knots_.size();
        // Degree-0 functions on half-open spans; the last nonempty span is
        // closed at t = 1.
        std::vector<double> b(nk - 1, 0.0);
        std::size_t span = degree_;
        while (span + 1 < nk - degree_ - 1 && !(t < knots_[span + 1])) {
            ++span;
        }
        b[span] = 1.0;
        for (std::size_t d = 1; d <= degree_; ++d) {
            for (std::size_t i = 0; i + d < nk - 1; ++i) {
                double v = 0.0;
                const double left = knots_[i + d] - knots_[i];
                const double right = knots_[i + d + 1] - knots_[i + 1];
                if (left > 0.0) {
                    v += (t - knots_[i]) / left * b[i];
                }
                if (right > 0.0) {
                    v += (knots_[i + d + 1] - t) / right * b[i + 1];
                }
                b[i] = v;
            }
        }
        b.resize(dim_);
        return b;
    }

private:
    std::size_t dim_;
    std::size_t degree_;
    std::vector<double> knots_;
};

}  // namespace relcp
