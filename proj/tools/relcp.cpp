// relcp: relevant change point detection for functional time series.
//
//   relcp detect   --input f.csv --out dir/ [--alpha 0.1 --delta auto --xi auto --L auto:fixed ...]
//   relcp simulate --scenario two|three --n N --seed S --out f.csv [--noiseless]
//   relcp diagnose --input f.csv --max-lag K --out v.csv

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "relcp/run.hpp"

namespace {

int fail(const std::string& kind, const std::string& message) {
    nlohmann::json err{{"error", {{"type", kind}, {"message", message}}}};
    std::cerr << err.dump() << '\n';
    return EXIT_FAILURE;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relevant change point detection for functional time series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", relcp::kVersion);

    // detect
    auto* detect = app.add_subcommand("detect", "Segment a series and test candidates for relevance");
    std::string config_path;
    std::string input, out_dir, delta = "auto", xi = "auto", block = "auto:fixed", min_seg = "auto";
    double alpha = 0.1, c = 0.1, edge_fraction = 0.05, delta_fraction = 1.0 / 3.0;
    std::size_t replicates = 1000, grid_size = 100;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    detect->add_option("--config", config_path, "JSON config file; flags override its values");
    detect->add_option("--input", input, "Cycle table CSV");
    detect->add_option("--out", out_dir, "Output directory");
    detect->add_option("--alpha", alpha, "Level of the relevance test");
    detect->add_option("--delta", delta, "Relevance threshold or 'auto'");
    detect->add_option("--xi", xi, "Segmentation threshold or 'auto'");
    detect->add_option("--L", block, "Block length, 'auto:fixed' or 'auto:plugin'");
    detect->add_option("--R", replicates, "Bootstrap replicates");
    detect->add_option("--c", c, "Extremal-set constant");
    detect->add_option("--seed", seed, "RNG seed");
    detect->add_option("--min-seg", min_seg, "Minimum segment length or 'auto' (L+1)");
    detect->add_option("--grid-size", grid_size, "Grid points per cycle");
    detect->add_option("--edge-fraction", edge_fraction, "Edge share used by delta=auto");
    detect->add_option("--delta-fraction", delta_fraction, "Fraction of the edge-mean gap used by delta=auto");
    detect->add_option("--threads", threads, "Bootstrap worker threads");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a seeded series with planted changes");
    relcp::io::SimulateArgs sim;
    simulate->add_option("--scenario", sim.scenario, "two|three")->check(CLI::IsMember({"two", "three"}));
    simulate->add_option("--n", sim.n, "Number of curves")->required();
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--grid-size", sim.grid_size, "Grid points per curve");
    simulate->add_option("--out", sim.out, "Output CSV")->required();
    simulate->add_flag("--noiseless", sim.noiseless, "Emit the mean schedule only");

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "Lag autocorrelation variogram");
    relcp::io::DiagnoseArgs diag;
    diagnose->add_option("--input", diag.input, "Cycle table CSV")->required();
    diagnose->add_option("--max-lag", diag.max_lag, "Largest lag");
    diagnose->add_option("--grid-size", diag.grid_size, "Grid points per cycle");
    diagnose->add_option("--out", diag.out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        return fail("usage", e.what());
    }

    try {
        if (*detect) {
            relcp::io::RunConfig cfg;
            if (!config_path.empty()) {
                cfg = relcp::io::load_config_file(config_path);
            }
            auto given = [&](const char* name) { return detect->count(name) > 0; };
            if (given("--input")) cfg.input = input;
            if (given("--out")) cfg.out_dir = out_dir;
            if (given("--alpha")) cfg.alpha = alpha;
            if (given("--delta")) cfg.delta = relcp::io::AutoValue::parse(delta);
            if (given("--xi")) cfg.xi = relcp::io::AutoValue::parse(xi);
            if (given("--L")) cfg.block = relcp::io::BlockSetting::parse(block);
            if (given("--R")) cfg.replicates = replicates;
            if (given("--c")) cfg.extremal_c = c;
            if (given("--seed")) cfg.seed = seed;
            if (given("--min-seg")) {
                const auto v = relcp::io::AutoValue::parse(min_seg);
                cfg.min_seg = v.value ? static_cast<std::size_t>(*v.value) : 0;
            }
            if (given("--grid-size")) cfg.grid_size = grid_size;
            if (given("--edge-fraction")) cfg.edge_fraction = edge_fraction;
            if (given("--delta-fraction")) cfg.delta_fraction = delta_fraction;
            if (given("--threads")) cfg.threads = threads;
            const auto report = relcp::io::run_detect(cfg);
            std::cout << "candidates: " << report["candidates"].size()
                      << ", relevant: " << report["relevant"].dump() << '\n';
        } else if (*simulate) {
            relcp::io::run_simulate(sim);
        } else if (*diagnose) {
            relcp::io::run_diagnose(diag);
        }
    } catch (const relcp::io::ConfigError& e) {
        return fail("config", e.what());
    } catch (const relcp::io::CsvError& e) {
        return fail("input", e.what());
    } catch (const std::exception& e) {
        return fail("runtime", e.what());
    }
    return EXIT_SUCCESS;
}
