#include <catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "relcp/cusum.hpp"

using Catch::Matchers::WithinAbs;
using relcp::FunctionalSeries;
using relcp::Grid;

namespace {

FunctionalSeries shift_series(std::size_t n, std::size_t p, std::size_t k_star, double height) {
    std::vector<double> data(n * p, 0.0);
    for (std::size_t j = k_star + 1; j <= n; ++j) {
        for (std::size_t t = 0; t < p; ++t) {
            data[(j - 1) * p + t] = height;
        }
    }
    return {Grid::uniform(p), std::move(data), n};
}

}  // namespace

TEST_CASE("cusum of identical curves vanishes", "[cusum]") {
    std::vector<double> data;
    for (int j = 0; j < 6; ++j) {
        data.insert(data.end(), {1.5, -2.0, 0.25});
    }
    const FunctionalSeries x(Grid::uniform(3), data, 6);
    const auto u = relcp::cusum(x, 0, 6);
    for (double v : u.values) {
        CHECK(std::abs(v) < 1e-15);
    }
}

TEST_CASE("cusum hand example", "[cusum]") {
    const FunctionalSeries x(Grid({0.0, 1.0}), {0, 0, 0, 0, 4, 4, 4, 4}, 4);
    const auto u = relcp::cusum(x, 0, 4);
    CHECK_THAT(u.row(2)[0], WithinAbs(-1.0, 1e-15));
    CHECK_THAT(u.row(4)[0], WithinAbs(0.0, 1e-15));
}

TEST_CASE("cusum rows match the double-loop oracle", "[cusum]") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const auto x = oracle::random_series(rng, 12, 3, 5.0);
        std::uniform_int_distribution<std::size_t> pick(0, 9);
        const std::size_t l = pick(rng);
        const std::size_t r = std::uniform_int_distribution<std::size_t>(l + 2, 12)(rng);
        const auto fast = relcp::cusum(x, l, r);
        const auto slow = oracle::cusum(x, l, r);
        REQUIRE(fast.values.size() == slow.size());
        for (std::size_t i = 0; i < slow.size(); ++i) {
            CHECK_THAT(fast.values[i], WithinAbs(slow[i], 1e-12));
        }
    }
}

TEST_CASE("cusum rejects degenerate windows", "[cusum]") {
    const auto x = shift_series(6, 2, 3, 1.0);
    CHECK_THROWS(relcp::cusum(x, 2, 3));
    CHECK_THROWS(relcp::cusum(x, 3, 2));
    CHECK_THROWS(relcp::cusum(x, 0, 7));
    CHECK_THROWS(relcp::cusum_supnorm_at(x, 0, 6, 6));
}

TEST_CASE("argmax of the L2 cusum", "[cusum]") {
    SECTION("noiseless single shift is located exactly") {
        for (std::size_t k_star : {1u, 7u, 20u, 33u, 39u}) {
            const auto x = shift_series(40, 5, k_star, 3.0);
            CHECK(relcp::cusum_argmax_l2(x, 0, 40).k == k_star);
        }
    }
    SECTION("constant series ties resolve to l + 1") {
        const FunctionalSeries x(Grid::uniform(2), std::vector<double>(20, 1.0), 10);
        const auto best = relcp::cusum_argmax_l2(x, 2, 10);
        CHECK(best.k == 3);
        CHECK(best.norm < 1e-14);
    }
    SECTION("exhaustive scan agrees") {
        std::mt19937_64 rng(5);
        for (int rep = 0; rep < 100; ++rep) {
            const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 20)(rng);
            const auto x = oracle::random_series(rng, n, 4);
            const auto fast = relcp::cusum_argmax_l2(x, 0, n);
            const auto slow = oracle::cusum_argmax(x, 0, n);
            CHECK(fast.k == slow.k);
            CHECK_THAT(fast.norm, WithinAbs(slow.norm, 1e-12));
        }
    }
}

TEST_CASE("sup norm of the window cusum", "[cusum]") {
    const FunctionalSeries flat(Grid::uniform(3), std::vector<double>(24, 2.0), 8);
    CHECK(relcp::cusum_supnorm_at(flat, 0, 8, 4) < 1e-15);

    // Shift of height d at fraction theta of the window gives a triangular
    // profile peaking at theta (1 - theta) d.
    for (std::size_t k : {25u, 50u, 80u}) {
        const auto x = shift_series(100, 4, k, 8.0);
        const double theta = static_cast<double>(k) / 100.0;
        CHECK_THAT(relcp::cusum_supnorm_at(x, 0, 100, k), WithinAbs(theta * (1 - theta) * 8.0, 8.0 / 100.0));
    }

    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 30; ++rep) {
        const auto x = oracle::random_series(rng, 15, 3);
        const auto slow = oracle::cusum(x, 2, 15);
        double m = 0.0;
        for (double v : slow) {
            m = std::max(m, std::abs(v));
        }
        CHECK_THAT(relcp::cusum_supnorm_at(x, 2, 15, 8), WithinAbs(m, 1e-12));
    }
}
