#pragma once

// CSV writing for experiment output. Full double precision (17 significant
// digits), UNIX newlines, deterministic bytes for identical inputs.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace drivencavity::cli {

using Series = std::vector<std::pair<std::string, std::vector<double>>>;

inline std::string format_value(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void write_series(const Series& columns, const std::string& path) {
    if (columns.empty()) throw ConfigError("write_series: no columns");
    const std::size_t rows = columns.front().second.size();
    for (const auto& [name, values] : columns) {
        if (name.empty() || name.find(',') != std::string::npos ||
            name.find('\n') != std::string::npos)
            throw ConfigError("write_series: bad column name '" + name + "'");
        if (values.size() != rows)
            throw DimensionError("write_series: column '" + name +
                                 "' length differs");
        for (double v : values)
            if (!std::isfinite(v))
                throw ConfigError("write_series: non-finite value in column '" +
                                  name + "'");
    }
    std::ofstream out(path, std::ios::binary); // binary keeps \n as written
    if (!out) throw Error("write_series: cannot open " + path);
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c].first;
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_value(columns[c].second[r]);
        out << '\n';
    }
    if (!out) throw Error("write_series: write failed for " + path);
}

} // namespace drivencavity::cli
