// aoictl - command-line front end.
//
//   aoictl optimize --config configs/default_v2.conf --set horizon=50 --out run1
//   aoictl validate --seed 7 --threads 4
//   aoictl demo-plant --set plant_g=01110 --set run_length=3
//
// Settings are applied in order: built-in defaults, --config file, the
// dedicated flags, then every --set KEY=VALUE.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <aoictl/commands.hpp>

namespace {

struct Options {
    std::string config_file;
    std::vector<std::string> sets;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::size_t> run_length;
    std::optional<std::size_t> horizon;
};

aoictl::RunConfig build_config(const Options& o) {
    aoictl::RunConfig cfg;
    if (!o.config_file.empty()) aoictl::apply_file(cfg, o.config_file);
    if (o.out) cfg.output_dir = *o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.optimizer.threads = *o.threads;
    if (o.run_length) cfg.run_length = *o.run_length;
    if (o.horizon) cfg.optimizer.horizon = *o.horizon;
    for (const auto& s : o.sets) aoictl::apply_assignment(cfg, s);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Access-policy optimization and latency analysis for wireless control over Aloha"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opts;
    app.add_option("-c,--config", opts.config_file, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("-s,--set", opts.sets, "override one setting, KEY=VALUE (repeatable)");
    app.add_option("-o,--out", opts.out, "output directory");
    app.add_option("--seed", opts.seed, "random seed");
    app.add_option("-j,--threads", opts.threads, "worker threads (results do not depend on it)");
    app.add_option("-v,--run-length", opts.run_length, "controllability index v");
    app.add_option("-K,--horizon", opts.horizon, "number of blocks to optimize");

    using Command = int (*)(const aoictl::RunConfig&, std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Command>> commands{
        {"optimize", "per-block policy optimization over the horizon", aoictl::cmd_optimize},
        {"validate", "analytic values against Monte Carlo, nonzero exit on failure", aoictl::cmd_validate},
        {"demo-plant", "slot-by-slot trace of one block of the plant protocol", aoictl::cmd_demo_plant},
        {"chi-table", "run probability over a grid of slot success probabilities", aoictl::cmd_chi_table},
        {"success-prob", "slot success probability against interferer density", aoictl::cmd_success_prob},
    };
    Command selected = nullptr;
    for (const auto& [name, help, fn] : commands) {
        app.add_subcommand(name, help)->callback([&selected, fn = fn] { selected = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? aoictl::kExitOk : aoictl::kExitConfigError;
    }

    try {
        const auto cfg = build_config(opts);
        return selected(cfg, std::cout);
    } catch (const aoictl::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return aoictl::kExitConfigError;
    } catch (const aoictl::OutputError& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return aoictl::kExitOutputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return aoictl::kExitOutputError;
    }
}
