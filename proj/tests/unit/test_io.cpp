#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "relcp/csv.hpp"
#include "relcp/run.hpp"
#include "relcp/simulate.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "relcp_unit" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("number formatting round-trips", "[io]") {
    for (double v : {0.0, -1.5, 0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
        CHECK(std::stod(relcp::io::format_double(v)) == v);
    }
}

TEST_CASE("resampling", "[io]") {
    const std::vector<double> two{0.0, 1.0};
    const auto r = relcp::io::resample_linear(two, 5);
    const std::vector<double> expect{0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK_THAT(r[i], WithinAbs(expect[i], 1e-15));
    }
    const std::vector<double> same{3.0, 1.0, 4.0};
    CHECK(relcp::io::resample_linear(same, 3) == same);
}

TEST_CASE("cycle table parsing", "[io]") {
    SECTION("rows of the grid size pass through") {
        std::istringstream in("1,2,3\n4,5,6\n\n7,8,9\n");
        const auto x = relcp::io::read_series_csv(in, 3);
        CHECK(x.size() == 3);
        CHECK(x.row(3)[2] == 9.0);
    }
    SECTION("header grid is used when every row fits it") {
        std::istringstream in("t=0,t=0.2,t=1\n1,2,3\n4,5,6\n");
        const auto x = relcp::io::read_series_csv(in, 3);
        CHECK(x.grid()[1] == 0.2);
    }
    SECTION("ragged rows are resampled") {
        std::istringstream in("0,1\n0,2,4\n0,1,2,3,4\n");
        const auto x = relcp::io::read_series_csv(in, 5);
        CHECK_THAT(x.row(1)[1], WithinAbs(0.25, 1e-15));
        CHECK_THAT(x.row(2)[3], WithinAbs(3.0, 1e-15));
        CHECK(x.row(3)[4] == 4.0);
    }
    SECTION("errors name the line and column") {
        std::istringstream bad("1,2,3\n4,x,6\n");
        CHECK_THROWS_WITH(relcp::io::read_series_csv(bad, 3), ContainsSubstring("line 2, column 2"));
        std::istringstream header("t=0,u=1\n1,2\n3,4\n");
        CHECK_THROWS_WITH(relcp::io::read_series_csv(header, 2), ContainsSubstring("column 2"));
        std::istringstream short_in("1,2,3\n");
        CHECK_THROWS_AS(relcp::io::read_series_csv(short_in, 3), relcp::io::CsvError);
        std::istringstream nan_in("1,2\nnan,4\n");
        CHECK_THROWS(relcp::io::read_series_csv(nan_in, 2));
        CHECK_THROWS_AS(relcp::io::ingest_csv("/nonexistent/input.csv", 3), relcp::io::CsvError);
    }
    SECTION("write then read reproduces the values") {
        const auto x = relcp::gen_series(relcp::SimScenario::two_change(30, 2, relcp::Grid::uniform(17)));
        std::stringstream buf;
        relcp::io::write_series_csv(buf, x);
        const auto y = relcp::io::read_series_csv(buf, 17);
        CHECK(y.grid() == x.grid());
        for (std::size_t i = 0; i < x.data().size(); ++i) {
            CHECK_THAT(y.data()[i], WithinAbs(x.data()[i], 1e-9));
        }
    }
}

TEST_CASE("run configuration", "[io]") {
    relcp::io::RunConfig cfg;
    relcp::io::apply_config_json(cfg, nlohmann::json::parse(R"({"alpha": 0.05, "delta": 3.5, "L": "auto:plugin", "R": 50})"));
    CHECK(cfg.alpha == 0.05);
    CHECK(cfg.delta.value == 3.5);
    CHECK(cfg.replicates == 50);
    CHECK_THROWS_AS(relcp::io::apply_config_json(cfg, nlohmann::json::parse(R"({"alpah": 0.05})")),
                    relcp::io::ConfigError);
    CHECK_THROWS_AS(relcp::io::AutoValue::parse("abc"), relcp::io::ConfigError);
    CHECK_THROWS_AS(relcp::io::BlockSetting::parse("auto:other"), relcp::io::ConfigError);
    CHECK(!relcp::io::AutoValue::parse("auto").value);
}

TEST_CASE("detect writes a deterministic report", "[io]") {
    const auto dir = scratch("detect");
    const auto x = relcp::gen_series(relcp::SimScenario::two_change(300, 4));
    relcp::io::write_series_csv((dir / "in.csv").string(), x);

    relcp::io::RunConfig cfg;
    cfg.input = (dir / "in.csv").string();
    cfg.replicates = 100;
    cfg.out_dir = (dir / "a").string();
    const auto report = relcp::io::run_detect(cfg);
    cfg.out_dir = (dir / "b").string();
    (void)relcp::io::run_detect(cfg);

    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    CHECK(fs::exists(dir / "a" / "series.csv"));
    CHECK(fs::exists(dir / "a" / "mean_differences.csv"));
    CHECK(report["delta"].get<double>() == relcp::select_delta(relcp::io::ingest_csv(cfg.input, 100)));
    CHECK(report["config"]["delta"] == "auto");
    const auto relevant = report["relevant"].get<std::vector<std::size_t>>();
    CHECK(relevant == std::vector<std::size_t>{100, 200});
    for (std::size_t s = 1; s <= report["candidates"].size() + 1; ++s) {
        CHECK(fs::exists(dir / "a" / ("segment_" + std::to_string(s) + "_mean.csv")));
    }
}

TEST_CASE("detect on a constant input reports no candidates", "[io]") {
    const auto dir = scratch("constant");
    {
        std::ofstream out(dir / "in.csv");
        for (int j = 0; j < 40; ++j) {
            out << "1,1,1,1\n";
        }
    }
    relcp::io::RunConfig cfg;
    cfg.input = (dir / "in.csv").string();
    cfg.grid_size = 4;
    cfg.out_dir = (dir / "out").string();
    const auto report = relcp::io::run_detect(cfg);
    CHECK(report["candidates"].empty());
    CHECK(report["relevant"].empty());
}

TEST_CASE("simulate and diagnose subcommands", "[io]") {
    const auto dir = scratch("simulate");
    relcp::io::SimulateArgs sim;
    sim.scenario = "three";
    sim.n = 60;
    sim.seed = 3;
    sim.out = (dir / "s.csv").string();
    relcp::io::run_simulate(sim);
    const auto first = slurp(dir / "s.csv");
    relcp::io::run_simulate(sim);
    CHECK(slurp(dir / "s.csv") == first);
    const auto x = relcp::io::ingest_csv(sim.out, 100);
    CHECK(x.size() == 60);

    sim.noiseless = true;
    relcp::io::run_simulate(sim);
    const auto pure = relcp::io::ingest_csv(sim.out, 100);
    CHECK_THAT(pure.row(16)[4], WithinAbs(relcp::scenario_mean(2, pure.grid()[4]), 1e-12));

    relcp::io::DiagnoseArgs diag;
    diag.input = (dir / "s.csv").string();
    diag.max_lag = 3;
    diag.out = (dir / "v.csv").string();
    relcp::io::run_diagnose(diag);
    const auto text = slurp(dir / "v.csv");
    CHECK(text.rfind("lag,value\n0,", 0) == 0);
}
