#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "greycast/series.hpp"

namespace greycast {

struct ColumnMapping {
    std::string speed_column = "speed";
    std::optional<std::string> timestamp_column;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

inline std::optional<double> parse_double(const std::string& s) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

}  // namespace detail

/**
 * Loads a speed series from a headered CSV file.
 *
 * Every data row must carry a positive, parseable speed; offending rows abort
 * the ingest with a message listing their (header-excluded) row numbers, so a
 * corrupted file never silently shortens the series.
 */
inline ObservationSeries ingest_csv(const std::filesystem::path& path,
                                    const ColumnMapping& mapping) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open input file: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw std::domain_error("input file is empty: " + path.string());
    const auto header = detail::split_csv_line(line);

    auto find_column = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::invalid_argument("column '" + name + "' not found in " + path.string());
    };
    const std::size_t speed_idx = find_column(mapping.speed_column);
    std::optional<std::size_t> ts_idx;
    if (mapping.timestamp_column) ts_idx = find_column(*mapping.timestamp_column);

    ObservationSeries series;
    std::vector<std::string> rejected;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        ++row;
        const auto fields = detail::split_csv_line(line);
        const std::string speed_text =
            speed_idx < fields.size() ? fields[speed_idx] : std::string{};
        const auto speed = detail::parse_double(speed_text);
        if (!speed || !std::isfinite(*speed) || *speed <= 0.0) {
            rejected.push_back("row " + std::to_string(row) + " (speed '" + speed_text + "')");
            continue;
        }
        std::optional<double> ts;
        if (ts_idx) {
            const std::string ts_text =
                *ts_idx < fields.size() ? fields[*ts_idx] : std::string{};
            ts = detail::parse_double(ts_text);
            if (!ts) {
                rejected.push_back("row " + std::to_string(row) + " (timestamp '" + ts_text +
                                   "')");
                continue;
            }
        }
        series.values.push_back(*speed);
        if (ts) series.timestamps.push_back(*ts);
    }

    if (!rejected.empty()) {
        std::string msg = "rejected " + std::to_string(rejected.size()) +
                          " row(s) with nonpositive or unparseable values: ";
        for (std::size_t i = 0; i < rejected.size(); ++i)
            msg += (i ? "; " : "") + rejected[i];
        throw std::domain_error(msg);
    }
    if (series.values.empty())
        throw std::domain_error("input file has no data rows: " + path.string());
    return series;
}

}  // namespace greycast
