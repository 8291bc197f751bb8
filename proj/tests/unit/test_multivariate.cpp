#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "relcp/multivariate.hpp"
#include "relcp/simulate.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using relcp::AggregationMode;
using relcp::BootstrapConfig;
using relcp::FunctionalSeries;
using relcp::MultivariateOptions;

namespace {

BootstrapConfig small_config() {
    BootstrapConfig cfg;
    cfg.replicates = 150;
    cfg.block_length = 4;
    cfg.seed = 77;
    return cfg;
}

FunctionalSeries scaled(const FunctionalSeries& x, double factor) {
    std::vector<double> data(x.data().begin(), x.data().end());
    for (double& v : data) {
        v *= factor;
    }
    return {x.grid(), std::move(data), x.size()};
}

}  // namespace

TEST_CASE("q norms and replicate aggregation", "[multivariate]") {
    const std::vector<double> v{3.0, -4.0};
    CHECK_THAT(relcp::q_norm(v, 2.0), WithinAbs(5.0, 1e-15));
    CHECK(relcp::q_norm(v, 1.0) == 7.0);
    CHECK(relcp::q_norm(v, std::numeric_limits<double>::infinity()) == 4.0);
    CHECK_THROWS(relcp::q_norm(v, 0.5));

    const std::vector<double> one{-1.5};
    CHECK(relcp::aggregate_replicate(one, 2.0) == -1.5);
    const std::vector<double> mixed{2.0, -7.0, 1.0};
    CHECK(relcp::aggregate_replicate(mixed, std::numeric_limits<double>::infinity()) == 2.0);
    CHECK_THAT(relcp::aggregate_replicate(mixed, 2.0), WithinAbs(std::sqrt(5.0), 1e-15));
    const std::vector<double> negative{-2.0, -0.5};
    CHECK(relcp::aggregate_replicate(negative, 2.0) == -0.5);
}

TEST_CASE("multivariate detection", "[multivariate]") {
    const auto x = relcp::gen_series(relcp::SimScenario::two_change(240, 3));
    const auto y = relcp::gen_series(relcp::SimScenario::two_change(240, 4));
    const double xi = relcp::default_xi(x);
    const auto cfg = small_config();
    const std::size_t min_seg = 10;

    SECTION("a single coordinate reduces to the univariate pipeline") {
        const std::vector<FunctionalSeries> xs{x};
        const std::vector<double> xis{xi};
        const auto uni = relcp::detect_relevant(x, 15.0, cfg, xi, min_seg);

        MultivariateOptions per;
        per.deltas = {15.0};
        const auto a = relcp::detect_relevant_multivariate(xs, per, cfg, xis, min_seg);
        REQUIRE(a.coordinates.size() == 1);
        CHECK(a.draws == uni.bootstrap_draws);
        CHECK(a.quantile == uni.quantile);
        CHECK(a.coordinates[0].relevant == uni.relevant);

        MultivariateOptions agg;
        agg.mode = AggregationMode::aggregated;
        agg.delta = 15.0;
        const auto b = relcp::detect_relevant_multivariate(xs, agg, cfg, xis, min_seg);
        CHECK(b.draws == uni.bootstrap_draws);
        CHECK(b.joint.relevant == uni.relevant);
        REQUIRE(b.joint.detectors.size() == uni.detectors.size());
        for (std::size_t i = 0; i < uni.detectors.size(); ++i) {
            CHECK(b.joint.detectors[i].value == uni.detectors[i].value);
        }
    }

    SECTION("infinite exponent aggregates by the maximum") {
        const std::vector<FunctionalSeries> xs{x, scaled(x, 0.5)};
        MultivariateOptions agg;
        agg.mode = AggregationMode::aggregated;
        agg.q = std::numeric_limits<double>::infinity();
        agg.delta = 10.0;
        const std::vector<double> xis{xi};
        const auto rep = relcp::detect_relevant_multivariate(xs, agg, cfg, xis, min_seg);
        const auto& cps = rep.joint.candidates;
        for (std::size_t i = 1; i <= cps.size(); ++i) {
            const double m0 = relcp::detector(xs[0], cps, i, 0.0).sup_cusum;
            const double m1 = relcp::detector(xs[1], cps, i, 0.0).sup_cusum;
            CHECK(rep.joint.detectors[i - 1].sup_cusum == std::max(m0, m1));
        }
    }

    SECTION("identical coordinates with q = 2 scale the sup by sqrt 2") {
        const std::vector<FunctionalSeries> xs{x, x};
        MultivariateOptions agg;
        agg.mode = AggregationMode::aggregated;
        agg.delta = 10.0;
        const std::vector<double> xis{xi};
        const auto rep = relcp::detect_relevant_multivariate(xs, agg, cfg, xis, min_seg);
        const auto& cps = rep.joint.candidates;
        REQUIRE(!cps.empty());
        for (std::size_t i = 1; i <= cps.size(); ++i) {
            const double m = relcp::detector(x, cps, i, 0.0).sup_cusum;
            CHECK_THAT(rep.joint.detectors[i - 1].sup_cusum, WithinRel(std::sqrt(2.0) * m, 1e-14));
        }
        CHECK(rep.joint.segment_means.front().size() == 2 * x.grid_size());
    }

    SECTION("per-coordinate mode shares one bootstrap quantile") {
        const std::vector<FunctionalSeries> xs{x, y};
        MultivariateOptions per;
        per.deltas = {15.0, 15.0};
        const std::vector<double> xis{xi, relcp::default_xi(y)};
        const auto rep = relcp::detect_relevant_multivariate(xs, per, cfg, xis, min_seg);
        REQUIRE(rep.coordinates.size() == 2);
        for (const auto& c : rep.coordinates) {
            CHECK(c.quantile == rep.quantile);
            for (std::size_t i = 0; i < c.relevant.size(); ++i) {
                CHECK(c.relevant[i] == (c.detectors[i].value > rep.quantile));
            }
        }
        // The shared draw dominates each coordinate's own draw.
        for (std::size_t c = 0; c < 2; ++c) {
            const auto own = relcp::assess_candidates(xs[c], rep.coordinates[c].candidates, 15.0, cfg);
            for (std::size_t r = 0; r < rep.draws.size(); ++r) {
                CHECK(rep.draws[r] >= own.bootstrap_draws[r]);
            }
        }
    }

    SECTION("errors") {
        const auto shorter = relcp::gen_series(relcp::SimScenario::two_change(120, 3));
        const std::vector<FunctionalSeries> xs{x, shorter};
        MultivariateOptions per;
        per.deltas = {1.0, 1.0};
        const std::vector<double> xis{xi};
        CHECK_THROWS(relcp::detect_relevant_multivariate(xs, per, cfg, xis, min_seg));
        const std::vector<FunctionalSeries> same{x, x};
        per.deltas = {1.0};
        CHECK_THROWS(relcp::detect_relevant_multivariate(same, per, cfg, xis, min_seg));
        MultivariateOptions agg;
        agg.mode = AggregationMode::aggregated;
        agg.q = 0.5;
        CHECK_THROWS(relcp::detect_relevant_multivariate(same, agg, cfg, xis, min_seg));
    }
}
