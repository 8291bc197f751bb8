#pragma once

/// @file
/// Command drivers behind the `relcp` tool: configuration with "auto"
/// resolution, the JSON report, and the plot-ready CSV artifacts.
///
/// Report schema (keys are stable):
///   {version, config, candidates: [{index, scaled, detector, relevant, ...}],
///    quantile, draws_summary: {min, q50, q90, max}, segments: [{from, to,
///    mean_file}], delta, xi, L, min_seg, relevant}
/// Every "auto" setting is written back with its resolved value.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "relcp/binseg.hpp"
#include "relcp/csv.hpp"
#include "relcp/diagnostics.hpp"
#include "relcp/relevance.hpp"
#include "relcp/simulate.hpp"
#include "relcp/tuning.hpp"
#include "relcp/version.hpp"

namespace relcp::io {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric setting or "auto".
struct AutoValue {
    std::optional<double> value;

    static AutoValue parse(const std::string& text) {
        if (text == "auto") {
            return {};
        }
        auto v = detail::parse_number(text);
        if (!v) {
            throw ConfigError("expected a number or 'auto', got '" + text + "'");
        }
        return {*v};
    }

    [[nodiscard]] json to_json() const { return value ? json(*value) : json("auto"); }
};

struct BlockSetting {
    enum class Kind { fixed_exponent, plug_in, explicit_length } kind = Kind::fixed_exponent;
    std::size_t length = 0;

    static BlockSetting parse(const std::string& text) {
        if (text == "auto" || text == "auto:fixed") {
            return {Kind::fixed_exponent, 0};
        }
        if (text == "auto:plugin") {
            return {Kind::plug_in, 0};
        }
        auto v = detail::parse_number(text);
        if (!v || *v < 1.0 || std::floor(*v) != *v) {
            throw ConfigError("block length must be a positive integer, 'auto:fixed' or 'auto:plugin', got '" +
                              text + "'");
        }
        return {Kind::explicit_length, static_cast<std::size_t>(*v)};
    }

    [[nodiscard]] json to_json() const {
        switch (kind) {
            case Kind::fixed_exponent:
                return "auto:fixed";
            case Kind::plug_in:
                return "auto:plugin";
            default:
                return length;
        }
    }
};

struct RunConfig {
    double alpha = 0.1;
    AutoValue delta;
    AutoValue xi;
    BlockSetting block;
    std::size_t replicates = 1000;
    double extremal_c = 0.1;
    std::uint64_t seed = 0;
    /// 0 means auto (L + 1).
    std::size_t min_seg = 0;
    std::size_t grid_size = 100;
    double edge_fraction = 0.05;
    double delta_fraction = 1.0 / 3.0;
    unsigned threads = 1;
    std::string input;
    std::string out_dir;

    /// Requested settings as written by the user (threads excluded: they do
    /// not affect results).
    [[nodiscard]] json to_json() const {
        return json{{"alpha", alpha},
                    {"delta", delta.to_json()},
                    {"xi", xi.to_json()},
                    {"L", block.to_json()},
                    {"R", replicates},
                    {"c", extremal_c},
                    {"seed", seed},
                    {"min_seg", min_seg == 0 ? json("auto") : json(min_seg)},
                    {"grid_size", grid_size},
                    {"edge_fraction", edge_fraction},
                    {"delta_fraction", delta_fraction},
                    {"input", input}};
    }
};

namespace detail {

inline std::string as_text(const json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number()) {
        return format_double(v.get<double>());
    }
    throw ConfigError("config value must be a number or string");
}

}  // namespace detail

/// Overlays the keys present in `j` on `cfg`. Unknown keys are an error.
inline void apply_config_json(RunConfig& cfg, const json& j) {
    if (!j.is_object()) {
        throw ConfigError("config file must hold a JSON object");
    }
    for (const auto& [key, v] : j.items()) {
        if (key == "alpha") {
            cfg.alpha = v.get<double>();
        } else if (key == "delta") {
            cfg.delta = AutoValue::parse(detail::as_text(v));
        } else if (key == "xi") {
            cfg.xi = AutoValue::parse(detail::as_text(v));
        } else if (key == "L") {
            cfg.block = BlockSetting::parse(detail::as_text(v));
        } else if (key == "R") {
            cfg.replicates = v.get<std::size_t>();
        } else if (key == "c") {
            cfg.extremal_c = v.get<double>();
        } else if (key == "seed") {
            cfg.seed = v.get<std::uint64_t>();
        } else if (key == "min_seg") {
            cfg.min_seg = v.is_string() && v.get<std::string>() == "auto" ? 0 : v.get<std::size_t>();
        } else if (key == "grid_size") {
            cfg.grid_size = v.get<std::size_t>();
        } else if (key == "edge_fraction") {
            cfg.edge_fraction = v.get<double>();
        } else if (key == "delta_fraction") {
            cfg.delta_fraction = v.get<double>();
        } else if (key == "threads") {
            cfg.threads = v.get<unsigned>();
        } else if (key == "input") {
            cfg.input = v.get<std::string>();
        } else if (key == "out") {
            cfg.out_dir = v.get<std::string>();
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config '" + path + "'");
    }
    RunConfig cfg;
    try {
        apply_config_json(cfg, json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return cfg;
}

/// Concrete tuning values for one series.
struct ResolvedSettings {
    double delta = 0.0;
    double xi = 0.0;
    std::size_t block_length = 1;
    std::size_t min_seg = 1;
    BootstrapConfig bootstrap;
};

[[nodiscard]] inline ResolvedSettings resolve(const RunConfig& cfg, const FunctionalSeries& x) {
    ResolvedSettings r;
    r.delta = cfg.delta.value ? *cfg.delta.value : select_delta(x, cfg.edge_fraction, cfg.delta_fraction);
    r.xi = cfg.xi.value ? *cfg.xi.value : default_xi(x);
    switch (cfg.block.kind) {
        case BlockSetting::Kind::fixed_exponent:
            r.block_length = select_block_length(x, BlockStrategy::fixed_exponent);
            break;
        case BlockSetting::Kind::plug_in:
            r.block_length = select_block_length(x, BlockStrategy::plug_in);
            break;
        default:
            r.block_length = cfg.block.length;
    }
    r.min_seg = cfg.min_seg == 0 ? r.block_length + 1 : cfg.min_seg;
    r.bootstrap.replicates = cfg.replicates;
    r.bootstrap.block_length = r.block_length;
    r.bootstrap.alpha = cfg.alpha;
    r.bootstrap.extremal_c = cfg.extremal_c;
    r.bootstrap.seed = cfg.seed;
    r.bootstrap.workers = cfg.threads;
    r.bootstrap.validate();
    if (r.delta < 0.0 || r.xi < 0.0) {
        throw ConfigError("delta and xi must be nonnegative");
    }
    return r;
}

namespace detail {

inline json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
}

}  // namespace detail

/// Report JSON for a finished run; file names refer to the artifacts
/// written by write_artifacts.
[[nodiscard]] inline json report_json(const RunConfig& cfg, const ResolvedSettings& res, const FunctionalSeries& x,
                                      const RelevanceReport& rep) {
    json j;
    j["version"] = kVersion;
    json conf = cfg.to_json();
    conf["resolved"] = {{"delta", res.delta},
                        {"xi", res.xi},
                        {"L", res.block_length},
                        {"min_seg", res.min_seg},
                        {"n", x.size()},
                        {"grid_size", x.grid_size()}};
    j["config"] = conf;
    j["delta"] = res.delta;
    j["xi"] = res.xi;
    j["L"] = res.block_length;
    j["min_seg"] = res.min_seg;

    const auto pts = x.grid().points();
    json cands = json::array();
    for (std::size_t i = 0; i < rep.candidates.size(); ++i) {
        const auto& det = rep.detectors[i];
        const auto& mu1 = rep.segment_means[i];
        const auto& mu2 = rep.segment_means[i + 1];
        std::size_t arg = 0;
        double sup = -1.0;
        for (std::size_t t = 0; t < mu1.size(); ++t) {
            const double d = std::abs(mu1[t] - mu2[t]);
            if (d > sup) {
                sup = d;
                arg = t;
            }
        }
        cands.push_back({{"index", rep.candidates.indices()[i]},
                         {"scaled", rep.candidates.scaled(i + 1)},
                         {"detector", det.value},
                         {"sup_cusum", det.sup_cusum},
                         {"h", det.h_at_change},
                         {"window_length", det.window_length},
                         {"relevant", static_cast<bool>(rep.relevant[i])},
                         {"mean_difference_sup", sup},
                         {"mean_difference_argsup", pts[arg]},
                         {"extremal_plus", rep.extremal[i].plus},
                         {"extremal_minus", rep.extremal[i].minus}});
    }
    j["candidates"] = cands;
    j["relevant"] = rep.relevant_indices();
    j["quantile"] = detail::nullable(rep.quantile);
    if (rep.bootstrap_draws.empty()) {
        j["draws_summary"] = nullptr;
    } else {
        std::vector<double> sorted = rep.bootstrap_draws;
        std::sort(sorted.begin(), sorted.end());
        j["draws_summary"] = {{"min", sorted.front()},
                              {"q50", empirical_quantile(sorted, 0.5)},
                              {"q90", empirical_quantile(sorted, 0.1)},
                              {"max", sorted.back()}};
    }
    json segs = json::array();
    for (std::size_t s = 0; s < rep.segment_means.size(); ++s) {
        segs.push_back({{"from", rep.candidates.boundary(s) + 1},
                        {"to", rep.candidates.boundary(s + 1)},
                        {"mean_file", "segment_" + std::to_string(s + 1) + "_mean.csv"}});
    }
    j["segments"] = segs;
    j["series_file"] = "series.csv";
    j["differences_file"] = "mean_differences.csv";
    return j;
}

/// series.csv, segment_<s>_mean.csv (t,value) and mean_differences.csv
/// (t, |mu_i - mu_{i+1}| per candidate).
inline void write_artifacts(const std::filesystem::path& dir, const FunctionalSeries& x,
                            const RelevanceReport& rep) {
    write_series_csv((dir / "series.csv").string(), x);
    const auto pts = x.grid().points();
    for (std::size_t s = 0; s < rep.segment_means.size(); ++s) {
        std::string text = "t,value\n";
        for (std::size_t t = 0; t < pts.size(); ++t) {
            text += format_double(pts[t]) + "," + format_double(rep.segment_means[s][t]) + "\n";
        }
        detail::write_text(dir / ("segment_" + std::to_string(s + 1) + "_mean.csv"), text);
    }
    std::string text = "t";
    for (std::size_t i = 0; i < rep.candidates.size(); ++i) {
        text += ",diff_" + std::to_string(i + 1);
    }
    text += "\n";
    for (std::size_t t = 0; t < pts.size(); ++t) {
        text += format_double(pts[t]);
        for (std::size_t i = 0; i < rep.candidates.size(); ++i) {
            text += "," + format_double(std::abs(rep.segment_means[i][t] - rep.segment_means[i + 1][t]));
        }
        text += "\n";
    }
    detail::write_text(dir / "mean_differences.csv", text);
}

/// Full detect run; returns the report written to <out>/report.json.
inline json run_detect(const RunConfig& cfg) {
    if (cfg.input.empty()) {
        throw ConfigError("detect: --input is required");
    }
    if (cfg.out_dir.empty()) {
        throw ConfigError("detect: --out is required");
    }
    const FunctionalSeries x = ingest_csv(cfg.input, cfg.grid_size);
    const ResolvedSettings res = resolve(cfg, x);
    const RelevanceReport rep = detect_relevant(x, res.delta, res.bootstrap, res.xi, res.min_seg);
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    json j = report_json(cfg, res, x, rep);
    detail::write_text(dir / "report.json", j.dump(2) + "\n");
    write_artifacts(dir, x, rep);
    return j;
}

struct SimulateArgs {
    std::string scenario = "two";
    std::size_t n = 300;
    std::uint64_t seed = 0;
    std::size_t grid_size = 100;
    bool noiseless = false;
    std::string out;
};

[[nodiscard]] inline FunctionalSeries simulate_series(const SimulateArgs& a) {
    const Grid grid = Grid::uniform(a.grid_size);
    SimScenario scn;
    if (a.scenario == "two") {
        scn = SimScenario::two_change(a.n, a.seed, grid);
    } else if (a.scenario == "three") {
        scn = SimScenario::three_change(a.n, a.seed, grid);
    } else {
        throw ConfigError("simulate: unknown scenario '" + a.scenario + "' (expected two|three)");
    }
    FmaParams params;
    if (a.noiseless) {
        params.noise_scale = 0.0;
    }
    return gen_series(scn, params);
}

inline void run_simulate(const SimulateArgs& a) {
    if (a.out.empty()) {
        throw ConfigError("simulate: --out is required");
    }
    write_series_csv(a.out, simulate_series(a));
}

struct DiagnoseArgs {
    std::string input;
    std::size_t max_lag = 10;
    std::size_t grid_size = 100;
    std::string out;
};

/// Two-column CSV `lag,value`; undefined lags are written as `nan`.
inline Variogram run_diagnose(const DiagnoseArgs& a) {
    if (a.input.empty() || a.out.empty()) {
        throw ConfigError("diagnose: --input and --out are required");
    }
    const FunctionalSeries x = ingest_csv(a.input, a.grid_size);
    const Variogram v = variogram(x, a.max_lag);
    std::string text = "lag,value\n";
    for (std::size_t i = 0; i < v.lags.size(); ++i) {
        text += std::to_string(v.lags[i]) + "," + (v.defined(i) ? format_double(v.values[i]) : "nan") + "\n";
    }
    detail::write_text(a.out, text);
    return v;
}

}  // namespace relcp::io
