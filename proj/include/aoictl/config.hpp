// config.hpp - flat key = value run configuration.
//
//   # comment
//   tx_power = 40dBm
//   run_length = 3
//
// Powers take a "dBm" or "W" suffix (bare numbers are watts). Unknown keys
// and malformed values raise ConfigError. Numbers are parsed with
// std::from_chars, so the process locale never matters.
#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "optimizer.hpp"
#include "plant.hpp"

namespace aoictl {

struct RunConfig {
    NetworkParams network;
    std::size_t block_length = 5;
    std::size_t run_length = 2;
    OptimizerConfig optimizer;

    std::uint64_t seed = 1;
    std::uint64_t episodes = 1'000'000;      // Bernoulli-tier episodes per comparison
    std::uint64_t spatial_episodes = 20'000;  // PPP realizations per single-slot SINR comparison
    std::uint64_t spatial_controller_episodes = 4'000;  // controller paths in the spatial block simulation
    std::size_t validate_blocks = 6;
    double disk_radius = 0.0;  // m; 0 picks 50 mean spacings of the interferer density
    double perturb_rho = 0.0;  // relative error injected into analytic rho (negative control)

    std::string plant_a = "1,0.1;0,1";
    std::string plant_b = "0;1";
    std::string plant_x_des = "1,0";
    std::string plant_x0 = "0,0";
    std::string plant_g;  // e.g. "01110"; empty draws G from plant_success and the seed
    double plant_success = 0.7;
    double plant_noise = 0.0;

    double chi_step = 0.05;
    std::size_t curve_points = 41;

    std::string output_dir = "out";

    BlockShape shape() const { return BlockShape(block_length, run_length); }

    Scenario scenario() const {
        Scenario sc{network, shape(), optimizer};
        sc.validate();
        return sc;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config: cannot parse '" + std::string(text) + "' for key '" + std::string(key) + "'");
    }
    return value;
}

inline double parse_power(std::string_view key, std::string_view text) {
    const auto ends_with = [&](std::string_view suffix) {
        return text.size() > suffix.size() && text.substr(text.size() - suffix.size()) == suffix;
    };
    if (ends_with("dBm")) return dbm_to_watts(parse_number<double>(key, trim(text.substr(0, text.size() - 3))));
    if (ends_with("W")) return parse_number<double>(key, trim(text.substr(0, text.size() - 1)));
    return parse_number<double>(key, text);
}

template <class Names>
auto parse_enum(std::string_view key, std::string_view text, const Names& names) {
    for (const auto& [name, value] : names) {
        if (name == text) return value;
    }
    throw ConfigError("config: unknown value '" + std::string(text) + "' for key '" + std::string(key) + "'");
}

}  // namespace detail

inline constexpr std::array<std::pair<std::string_view, CdfMode>, 2> kCdfModeNames{
    {{"indicator", CdfMode::kIndicator}, {"grid-rank", CdfMode::kGridRank}}};
inline constexpr std::array<std::pair<std::string_view, HistoryScalar>, 2> kHistoryNames{
    {{"posterior-mean", HistoryScalar::kPosteriorMean}, {"pending-access", HistoryScalar::kPendingAccess}}};
inline constexpr std::array<std::pair<std::string_view, VirtualBlock>, 2> kVirtualBlockNames{
    {{"boundary", VirtualBlock::kBoundary}, {"first-block", VirtualBlock::kFirstBlock}}};

template <class E, std::size_t N>
std::string_view enum_name(E value, const std::array<std::pair<std::string_view, E>, N>& names) {
    for (const auto& [name, v] : names) {
        if (v == value) return name;
    }
    return "?";
}

/// Sets one key. Throws ConfigError for unknown keys or bad values.
inline void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    using detail::parse_number;
    value = detail::trim(value);
    auto& net = cfg.network;
    auto& opt = cfg.optimizer;
    if (key == "density") net.density = parse_number<double>(key, value);
    else if (key == "path_loss") net.path_loss = parse_number<double>(key, value);
    else if (key == "sinr_threshold") net.sinr_threshold = parse_number<double>(key, value);
    else if (key == "tx_power") net.tx_power = detail::parse_power(key, value);
    else if (key == "noise_power") net.noise_power = detail::parse_power(key, value);
    else if (key == "link_distance") net.link_distance = parse_number<double>(key, value);
    else if (key == "block_length") cfg.block_length = parse_number<std::size_t>(key, value);
    else if (key == "run_length") cfg.run_length = parse_number<std::size_t>(key, value);
    else if (key == "grid_step") opt.grid_step = parse_number<double>(key, value);
    else if (key == "rho1") opt.rho1 = parse_number<double>(key, value);
    else if (key == "rho2") opt.rho2 = parse_number<double>(key, value);
    else if (key == "eta_curr") opt.eta_curr = parse_number<double>(key, value);
    else if (key == "eta_pcl") opt.eta_pcl = parse_number<double>(key, value);
    else if (key == "horizon") opt.horizon = parse_number<std::size_t>(key, value);
    else if (key == "cdf_mode") opt.cdf_mode = detail::parse_enum(key, value, kCdfModeNames);
    else if (key == "history") opt.history = detail::parse_enum(key, value, kHistoryNames);
    else if (key == "virtual_block") opt.virtual_block = detail::parse_enum(key, value, kVirtualBlockNames);
    else if (key == "threads") opt.threads = parse_number<unsigned>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "episodes") cfg.episodes = parse_number<std::uint64_t>(key, value);
    else if (key == "spatial_episodes") cfg.spatial_episodes = parse_number<std::uint64_t>(key, value);
    else if (key == "spatial_controller_episodes") cfg.spatial_controller_episodes = parse_number<std::uint64_t>(key, value);
    else if (key == "validate_blocks") cfg.validate_blocks = parse_number<std::size_t>(key, value);
    else if (key == "disk_radius") cfg.disk_radius = parse_number<double>(key, value);
    else if (key == "perturb_rho") cfg.perturb_rho = parse_number<double>(key, value);
    else if (key == "plant_a") cfg.plant_a = value;
    else if (key == "plant_b") cfg.plant_b = value;
    else if (key == "plant_x_des") cfg.plant_x_des = value;
    else if (key == "plant_x0") cfg.plant_x0 = value;
    else if (key == "plant_g") cfg.plant_g = value;
    else if (key == "plant_success") cfg.plant_success = parse_number<double>(key, value);
    else if (key == "plant_noise") cfg.plant_noise = parse_number<double>(key, value);
    else if (key == "chi_step") cfg.chi_step = parse_number<double>(key, value);
    else if (key == "curve_points") cfg.curve_points = parse_number<std::size_t>(key, value);
    else if (key == "output_dir") cfg.output_dir = value;
    else throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

/// Applies "key=value".
inline void apply_assignment(RunConfig& cfg, std::string_view line) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("config: expected key = value, got '" + std::string(line) + "'");
    const auto key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config: empty key");
    apply_setting(cfg, key, line.substr(eq + 1));
}

inline void apply_text(RunConfig& cfg, std::string_view text) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        try {
            apply_assignment(cfg, line);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

inline void apply_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        apply_text(cfg, buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// "1,0.1;0,1" -> 2x2. Rows separated by ';', entries by ','.
inline Matrix parse_matrix(std::string_view key, std::string_view text) {
    std::vector<std::vector<double>> rows;
    while (true) {
        const auto semi = text.find(';');
        auto row_text = text.substr(0, semi);
        std::vector<double> row;
        while (true) {
            const auto comma = row_text.find(',');
            row.push_back(detail::parse_number<double>(key, detail::trim(row_text.substr(0, comma))));
            if (comma == std::string_view::npos) break;
            row_text = row_text.substr(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ConfigError("config: ragged matrix for key '" + std::string(key) + "'");
        }
        rows.push_back(std::move(row));
        if (semi == std::string_view::npos) break;
        text = text.substr(semi + 1);
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

/// Vector keys accept either "1,0" or "1;0".
inline Vector parse_vector(std::string_view key, std::string_view text) {
    const Matrix m = parse_matrix(key, text);
    if (m.rows() != 1 && m.cols() != 1) throw ConfigError("config: '" + std::string(key) + "' must be a vector");
    return Eigen::Map<const Vector>(m.data(), m.size());
}

inline PlantModel plant_model(const RunConfig& cfg) {
    return PlantModel(parse_matrix("plant_a", cfg.plant_a), parse_matrix("plant_b", cfg.plant_b),
                      parse_vector("plant_x_des", cfg.plant_x_des), cfg.run_length, cfg.plant_noise);
}

/// Settings that determine results, in a fixed order. `threads` is left out:
/// outputs do not depend on it.
inline std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg) {
    const auto num = [](auto x) {
        std::ostringstream os;
        os.imbue(std::locale::classic());
        os.precision(17);
        os << x;
        return os.str();
    };
    const auto& net = cfg.network;
    const auto& opt = cfg.optimizer;
    return {
        {"density", num(net.density)},
        {"path_loss", num(net.path_loss)},
        {"sinr_threshold", num(net.sinr_threshold)},
        {"tx_power", num(net.tx_power) + "W"},
        {"noise_power", num(net.noise_power) + "W"},
        {"link_distance", num(net.link_distance)},
        {"block_length", num(cfg.block_length)},
        {"run_length", num(cfg.run_length)},
        {"grid_step", num(opt.grid_step)},
        {"rho1", num(opt.rho1)},
        {"rho2", num(opt.rho2)},
        {"eta_curr", num(opt.eta_curr)},
        {"eta_pcl", num(opt.eta_pcl)},
        {"horizon", num(opt.horizon)},
        {"cdf_mode", std::string(enum_name(opt.cdf_mode, kCdfModeNames))},
        {"history", std::string(enum_name(opt.history, kHistoryNames))},
        {"virtual_block", std::string(enum_name(opt.virtual_block, kVirtualBlockNames))},
        {"seed", num(cfg.seed)},
        {"episodes", num(cfg.episodes)},
        {"spatial_episodes", num(cfg.spatial_episodes)},
        {"spatial_controller_episodes", num(cfg.spatial_controller_episodes)},
        {"validate_blocks", num(cfg.validate_blocks)},
        {"disk_radius", num(cfg.disk_radius)},
        {"perturb_rho", num(cfg.perturb_rho)},
        {"plant_a", cfg.plant_a},
        {"plant_b", cfg.plant_b},
        {"plant_x_des", cfg.plant_x_des},
        {"plant_x0", cfg.plant_x0},
        {"plant_g", cfg.plant_g},
        {"plant_success", num(cfg.plant_success)},
        {"plant_noise", num(cfg.plant_noise)},
        {"chi_step", num(cfg.chi_step)},
        {"curve_points", num(cfg.curve_points)},
    };
}

}  // namespace aoictl
