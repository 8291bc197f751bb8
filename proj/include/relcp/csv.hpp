#pragma once

/// @file
/// Cycle tables: one curve per CSV row, temporal order top to bottom.
///
/// An optional header row names the grid fractions as `t=<value>` cells.
/// Rows of exactly `grid_size` values are taken as they are; other rows are
/// treated as cycles sampled uniformly at native resolution and linearly
/// resampled onto a uniform grid of `grid_size` points on [0, 1].

#include <array>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "relcp/fda_core.hpp"

namespace relcp::io {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest representation that parses back to the same double.
[[nodiscard]] inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return {buf.data(), end};
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return cells;
}

inline std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return v;
}

}  // namespace detail

/// Linear interpolation of a uniformly sampled cycle onto `grid_size`
/// uniform points of [0, 1].
[[nodiscard]] inline std::vector<double> resample_linear(std::span<const double> row, std::size_t grid_size) {
    if (row.size() < 2) {
        throw CsvError("resample: a cycle needs at least 2 samples");
    }
    if (grid_size < 2) {
        throw CsvError("resample: grid size must be >= 2");
    }
    std::vector<double> out(grid_size);
    const double last = static_cast<double>(row.size() - 1);
    for (std::size_t g = 0; g < grid_size; ++g) {
        const double pos = static_cast<double>(g) / static_cast<double>(grid_size - 1) * last;
        auto lo = static_cast<std::size_t>(pos);
        if (lo >= row.size() - 1) {
            out[g] = row.back();
            continue;
        }
        const double frac = pos - static_cast<double>(lo);
        out[g] = row[lo] + frac * (row[lo + 1] - row[lo]);
    }
    return out;
}

[[nodiscard]] inline FunctionalSeries read_series_csv(std::istream& in, std::size_t grid_size) {
    std::vector<std::vector<double>> rows;
    std::optional<std::vector<double>> header;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto cells = detail::split(line);
        if (rows.empty() && !header && cells.front().starts_with("t=")) {
            std::vector<double> pts;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                auto v = cells[c].starts_with("t=") ? detail::parse_number(cells[c].substr(2)) : std::nullopt;
                if (!v) {
                    throw CsvError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                   ": malformed header cell '" + std::string(cells[c]) + "'");
                }
                pts.push_back(*v);
            }
            header = std::move(pts);
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            auto v = detail::parse_number(cells[c]);
            if (!v) {
                throw CsvError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                               ": non-numeric value '" + std::string(cells[c]) + "'");
            }
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) {
        throw CsvError("cycle table needs at least 2 rows, found " + std::to_string(rows.size()));
    }
    bool all_match = true;
    for (const auto& r : rows) {
        all_match = all_match && r.size() == grid_size;
    }
    Grid grid = Grid::uniform(grid_size);
    if (all_match && header && header->size() == grid_size) {
        grid = Grid(*header);
    }
    std::vector<double> data;
    data.reserve(rows.size() * grid_size);
    for (const auto& r : rows) {
        if (r.size() == grid_size) {
            data.insert(data.end(), r.begin(), r.end());
        } else {
            const auto res = resample_linear(r, grid_size);
            data.insert(data.end(), res.begin(), res.end());
        }
    }
    const std::size_t n = rows.size();
    return FunctionalSeries(std::move(grid), std::move(data), n);
}

[[nodiscard]] inline FunctionalSeries ingest_csv(const std::string& path, std::size_t grid_size) {
    std::ifstream in(path);
    if (!in) {
        throw CsvError("cannot open '" + path + "'");
    }
    return read_series_csv(in, grid_size);
}

/// Header of `t=` cells followed by one row per curve.
inline void write_series_csv(std::ostream& out, const FunctionalSeries& x) {
    const auto pts = x.grid().points();
    for (std::size_t g = 0; g < pts.size(); ++g) {
        out << (g ? "," : "") << "t=" << format_double(pts[g]);
    }
    out << '\n';
    for (std::size_t j = 1; j <= x.size(); ++j) {
        const auto r = x.row(j);
        for (std::size_t g = 0; g < r.size(); ++g) {
            out << (g ? "," : "") << format_double(r[g]);
        }
        out << '\n';
    }
}

inline void write_series_csv(const std::string& path, const FunctionalSeries& x) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw CsvError("cannot write '" + path + "'");
    }
    write_series_csv(out, x);
}

}  // namespace relcp::io
