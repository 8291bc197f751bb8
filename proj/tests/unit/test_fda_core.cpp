#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "relcp/fda_core.hpp"
#include "relcp/simulate.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using relcp::Curve;
using relcp::FunctionalSeries;
using relcp::Grid;

TEST_CASE("grid validation and trapezoid weights", "[fda_core]") {
    CHECK_THROWS_AS(Grid({0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Grid({0.0, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Grid({-0.1, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Grid({0.2, 1.1}), std::invalid_argument);

    const Grid g({0.0, 0.25, 1.0});
    const auto w = g.weights();
    CHECK_THAT(w[0], WithinAbs(0.125, 1e-15));
    CHECK_THAT(w[1], WithinAbs(0.5, 1e-15));
    CHECK_THAT(w[2], WithinAbs(0.375, 1e-15));

    const Grid u = Grid::uniform(11);
    CHECK(u.size() == 11);
    CHECK(u[0] == 0.0);
    CHECK(u[10] == 1.0);
}

TEST_CASE("curves and series reject non-finite values", "[fda_core]") {
    CHECK_THROWS(Curve({1.0, std::nan("")}));
    CHECK_THROWS(Curve({1.0, INFINITY}));
    CHECK_THROWS(FunctionalSeries(Grid::uniform(2), {1.0, 2.0, 3.0}, 2));
    CHECK_THROWS(FunctionalSeries(Grid::uniform(2), {1.0, 2.0}, 1));
    const FunctionalSeries x(Grid::uniform(2), {1.0, 2.0, 3.0, 4.0}, 2);
    CHECK(x.row(2)[0] == 3.0);
    CHECK_THROWS_AS(x.row(0), std::out_of_range);
    CHECK_THROWS_AS(x.row(3), std::out_of_range);
}

TEST_CASE("sup norm", "[fda_core]") {
    CHECK(relcp::sup_norm(Curve({0.0, 0.0, 0.0})) == 0.0);
    CHECK(relcp::sup_norm(Curve({-3.0, 1.0, 2.0})) == 3.0);
}

TEST_CASE("sup norm of the bump on a fine grid matches a dense spline scan", "[fda_core]") {
    const Grid g = Grid::uniform(1000);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        v[i] = relcp::bump_delta_j(g[i]);
    }
    double dense = 0.0;
    double arg = 0.0;
    for (int i = 0; i <= 1'000'000; ++i) {
        const double t = i * 1e-6;
        const double b = relcp::bump_delta_j(t);
        if (std::abs(b) > dense) {
            dense = std::abs(b);
            arg = t;
        }
    }
    // The symmetric bump peaks on its reflection axis.
    CHECK_THAT(arg, WithinAbs(0.085, 1e-5));
    CHECK_THAT(relcp::sup_norm(Curve(v)), WithinRel(dense, 1e-3));
}

TEST_CASE("L2 norm by trapezoid quadrature", "[fda_core]") {
    const Grid g = Grid::uniform(101);
    CHECK(relcp::l2_norm(Curve(std::vector<double>(101, 0.0)), g) == 0.0);
    CHECK_THAT(relcp::l2_norm(Curve(std::vector<double>(101, 2.0)), g), WithinAbs(2.0, 1e-14));
    std::vector<double> id(101);
    for (std::size_t i = 0; i < id.size(); ++i) {
        id[i] = g[i];
    }
    CHECK_THAT(relcp::l2_norm(Curve(id), g), WithinAbs(1.0 / std::sqrt(3.0), 1e-4));
    CHECK_THROWS(relcp::l2_norm(Curve({1.0, 2.0}), g));
}

TEST_CASE("segment mean", "[fda_core]") {
    const FunctionalSeries two(Grid::uniform(3), {0, 0, 0, 2, 2, 2}, 2);
    const Curve only = relcp::segment_mean(two, 2, 2);
    CHECK(only.values()[0] == 2.0);
    const Curve mid = relcp::segment_mean(two, 1, 2);
    for (double v : mid.values()) {
        CHECK(v == 1.0);
    }
    CHECK_THROWS(relcp::segment_mean(two, 2, 1));
    CHECK_THROWS(relcp::segment_mean(two, 1, 3));

    std::mt19937_64 rng(7);
    const auto x = oracle::random_series(rng, 9, 4);
    const Curve m = relcp::segment_mean(x, 3, 7);
    for (std::size_t t = 0; t < 4; ++t) {
        double s = 0.0;
        for (std::size_t j = 3; j <= 7; ++j) {
            s += x.row(j)[t];
        }
        CHECK_THAT(m.values()[t], WithinAbs(s / 5.0, 1e-14));
    }
}

TEST_CASE("segment map", "[fda_core]") {
    CHECK(relcp::rescale(relcp::SegmentMap(0.0, 1.0), 0.3) == 0.3);
    CHECK_THAT(relcp::rescale(relcp::SegmentMap(0.2, 0.6), 0.4), WithinAbs(0.5, 1e-15));
    const relcp::SegmentMap m(0.2, 0.6);
    CHECK(m(0.6) == 1.0);
    CHECK(m(0.2) == 0.0);
    CHECK_THROWS_AS(m(0.61), std::domain_error);
    CHECK_THROWS_AS(m(0.1), std::domain_error);
    CHECK_THROWS(relcp::SegmentMap(0.5, 0.5));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lo_d(0.0, 0.5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const double lo = lo_d(rng);
        const double hi = lo + 0.01 + (1.0 - lo - 0.01) * u(rng);
        const relcp::SegmentMap map(lo, hi);
        const double s = std::min(hi, lo + (hi - lo) * u(rng));
        CHECK_THAT(map.inverse(map(s)), WithinAbs(s, 1e-15));
        const double v = u(rng);
        CHECK_THAT(map(map.inverse(v)), WithinAbs(v, 4e-16 / (hi - lo)));
    }
}
