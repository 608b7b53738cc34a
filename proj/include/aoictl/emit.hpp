// emit.hpp - CSV tables with self-describing headers and JSON sidecars.
#pragma once

#include <charconv>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/version.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "config.hpp"

namespace aoictl {

inline constexpr std::string_view kVersion = "0.1.0";

/// 17 significant digits with a '.' decimal point whatever the locale.
inline std::string format_double(double x) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    if (ec != std::errc{}) throw std::runtime_error("format_double: buffer too small");
    return std::string(buf, end);
}

struct Column {
    std::string name;
    std::string unit;  // "slots", "blocks", "1" for probabilities, ...
    std::string description;
};

class CsvTable {
public:
    explicit CsvTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

    CsvTable& comment(std::string line) {
        comments_.push_back(std::move(line));
        return *this;
    }

    /// Cells are pre-formatted; use cell() for numbers.
    void add_row(std::vector<std::string> cells) {
        if (cells.size() != columns_.size()) throw std::logic_error("CsvTable: row width differs from header");
        rows_.push_back(std::move(cells));
    }

    static std::string cell(double x) { return format_double(x); }
    template <std::integral I>
    static std::string cell(I x) { return std::to_string(x); }
    static std::string cell(bool x) { return x ? "1" : "0"; }
    static std::string cell(std::string_view s) { return std::string(s); }

    std::size_t rows() const noexcept { return rows_.size(); }

    std::string str() const {
        std::string out;
        for (const auto& c : comments_) out += "# " + c + "\n";
        for (const auto& c : columns_) out += "# " + c.name + " [" + c.unit + "]: " + c.description + "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i].name;
        out += "\n";
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
            out += "\n";
        }
        return out;
    }

private:
    std::vector<Column> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<std::string>> rows_;
};

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw OutputError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw OutputError("write failed for " + path.string());
}

/// Metadata sidecar: command, config echo and library versions. No clock or
/// host information, so identical runs give identical bytes.
inline nlohmann::ordered_json metadata(std::string_view command, const RunConfig& cfg,
                                       const std::vector<std::string>& outputs) {
    nlohmann::ordered_json meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    nlohmann::ordered_json config;
    for (const auto& [key, value] : describe(cfg)) config[key] = value;
    meta["config"] = std::move(config);
    meta["seed"] = cfg.seed;
    meta["libraries"] = {
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                      std::to_string(BOOST_VERSION % 100)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
    };
    meta["outputs"] = outputs;
    return meta;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    write_file(path, j.dump(2) + "\n");
}

}  // namespace aoictl
