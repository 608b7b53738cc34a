// commands.hpp - the CLI commands as library functions. Each writes its
// files under cfg.output_dir and returns the process exit status.
#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "emit.hpp"
#include "montecarlo.hpp"
#include "optimizer.hpp"
#include "plant.hpp"
#include "validate.hpp"

namespace aoictl {

enum ExitCode : int { kExitOk = 0, kExitValidationFailed = 1, kExitConfigError = 2, kExitOutputError = 3 };

inline CsvTable optimize_table(const RunConfig& cfg, const PolicyTrace& trace) {
    CsvTable t({{"k", "blocks", "block index"},
                {"delta_B", "1", "chosen block access probability (not yet controllable)"},
                {"delta_S", "1", "chosen slot access probability (not yet controllable)"},
                {"delta_C", "1", "chosen slot access probability (already controllable)"},
                {"rho", "1", "slot success probability given access"},
                {"pi", "1", "first-time controllability probability of the block"},
                {"P_O", "1", "probability of having been controllable in some block up to k"},
                {"P_O_inst", "1", "probability that block k is controllable"},
                {"theta_curr", "slots", "current-block latency of the first success"},
                {"pcl_mean", "blocks", "expected peak control latency (past blocks only)"},
                {"cost", "1", "objective value of the chosen policy"},
                {"p_k", "1", "slot success probability stored in the latency history"},
                {"peak_latency", "slots", "expected peak latency of the first success in block k"},
                {"paoi", "slots", "expected peak age of information at the first success in block k"},
                {"degenerate", "1", "1 if no regime transmits in block k"}});
    t.comment("aoictl optimize, block_length = " + std::to_string(cfg.block_length) +
              ", run_length = " + std::to_string(cfg.run_length) + ", seed = " + std::to_string(cfg.seed));
    for (const auto& r : trace.blocks) {
        t.add_row({CsvTable::cell(r.block), CsvTable::cell(r.policy.block), CsvTable::cell(r.policy.slot),
                   CsvTable::cell(r.policy.post), CsvTable::cell(r.rho), CsvTable::cell(r.first_time),
                   CsvTable::cell(r.controllable), CsvTable::cell(r.inst_controllable),
                   CsvTable::cell(r.mixture.latency), CsvTable::cell(r.pcl_mean), CsvTable::cell(r.cost),
                   CsvTable::cell(r.history_success), CsvTable::cell(r.peak_latency), CsvTable::cell(r.paoi),
                   CsvTable::cell(r.degenerate)});
    }
    return t;
}

inline int cmd_optimize(const RunConfig& cfg, std::ostream& log) {
    const auto trace = run_horizon(cfg.scenario());
    const std::filesystem::path dir(cfg.output_dir);
    write_file(dir / "optimize.csv", optimize_table(cfg, trace).str());
    write_json(dir / "optimize.json", metadata("optimize", cfg, {"optimize.csv"}));
    const auto& last = trace.blocks.back();
    log << "optimize: " << trace.blocks.size() << " blocks, final P_O = " << format_double(last.controllable)
        << ", final pcl_mean = " << format_double(last.pcl_mean) << " blocks\n";
    return kExitOk;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& log) {
    const auto report = run_validation(cfg);
    const std::filesystem::path dir(cfg.output_dir);
    write_file(dir / "validate.csv", report.table().str());
    auto meta = metadata("validate", cfg, {"validate.csv"});
    meta["comparisons"] = report.rows.size();
    meta["failures"] = std::count_if(report.rows.begin(), report.rows.end(), [](const auto& c) { return !c.pass; });
    meta["passed"] = report.passed();
    write_json(dir / "validate.json", meta);
    for (const auto& c : report.rows) {
        log << (c.pass ? "PASS " : "FAIL ") << c.name << ": analytic " << format_double(c.analytic) << ", mc "
            << format_double(c.estimate.mean) << " +- " << format_double(c.estimate.std_error) << ", z "
            << format_double(c.z) << "\n";
    }
    log << "validate: " << report.rows.size() << " comparisons, " << (report.passed() ? "all passed" : "FAILED") << "\n";
    return report.passed() ? kExitOk : kExitValidationFailed;
}

/// Success flags of the demo block: plant_g if given, otherwise seeded draws.
inline std::vector<std::uint8_t> demo_success_flags(const RunConfig& cfg) {
    std::vector<std::uint8_t> g;
    if (!cfg.plant_g.empty()) {
        for (char c : cfg.plant_g) {
            if (c != '0' && c != '1') throw ConfigError("config: plant_g must contain only 0 and 1");
            g.push_back(c == '1' ? 1 : 0);
        }
        if (g.size() != cfg.block_length) throw ConfigError("config: plant_g must have block_length entries");
        return g;
    }
    detail::require_probability(cfg.plant_success, "plant_success");
    RandomStream rng(cfg.seed, 0);
    for (std::size_t i = 0; i < cfg.block_length; ++i) g.push_back(rng.bernoulli(cfg.plant_success) ? 1 : 0);
    return g;
}

inline nlohmann::ordered_json to_json(const Vector& v) {
    auto arr = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

inline int cmd_demo_plant(const RunConfig& cfg, std::ostream& log) {
    const auto model = plant_model(cfg);
    const auto g = demo_success_flags(cfg);
    const Vector x0 = parse_vector("plant_x0", cfg.plant_x0);
    RandomStream noise(cfg.seed, 1);
    const auto trace = run_block(model, cfg.shape(), x0, g, &noise);

    auto meta = metadata("demo-plant", cfg, {"plant_trace.json"});
    nlohmann::ordered_json out;
    out["controllable"] = trace.controllable;
    out["runlength_detector"] = has_run(g, cfg.run_length);
    out["target_slot"] = trace.target_slot ? nlohmann::ordered_json(*trace.target_slot) : nlohmann::ordered_json();
    out["x_des"] = to_json(model.x_des());
    out["steady_input"] = to_json(model.steady_input());
    out["x_start"] = to_json(x0);
    auto slots = nlohmann::ordered_json::array();
    for (const auto& s : trace.slots) {
        slots.push_back({{"slot", s.slot},
                         {"phase", phase_name(s.phase)},
                         {"success", s.success},
                         {"input", to_json(s.input)},
                         {"estimate", to_json(s.estimate)},
                         {"state", to_json(s.state)}});
    }
    out["slots"] = std::move(slots);
    out["final_estimate"] = to_json(trace.final_estimate);
    out["final_state"] = to_json(trace.final_state);
    meta["trace"] = std::move(out);
    write_json(std::filesystem::path(cfg.output_dir) / "plant_trace.json", meta);

    log << "demo-plant: G = ";
    for (auto b : g) log << int(b);
    log << ", ";
    if (trace.target_slot) log << "target at slot " << *trace.target_slot << "\n";
    else log << "target not reached\n";
    return kExitOk;
}

inline int cmd_chi_table(const RunConfig& cfg, std::ostream& log) {
    const OptimizerConfig grid{.grid_step = cfg.chi_step};
    const std::size_t n = grid.grid_intervals();
    CsvTable t({{"run_length", "slots", "required run of successes v"},
                {"x", "1", "per-slot success probability"},
                {"chi", "1", "probability of at least v consecutive successes in the block"}});
    t.comment("aoictl chi-table, block_length = " + std::to_string(cfg.block_length));
    for (std::size_t v = 1; v <= cfg.block_length; ++v) {
        const BlockShape shape(cfg.block_length, v);
        for (std::size_t i = 0; i <= n; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(n);
            t.add_row({CsvTable::cell(v), CsvTable::cell(x), CsvTable::cell(chi(shape, x))});
        }
    }
    const std::filesystem::path dir(cfg.output_dir);
    write_file(dir / "chi.csv", t.str());
    write_json(dir / "chi.json", metadata("chi-table", cfg, {"chi.csv"}));
    log << "chi-table: " << t.rows() << " rows\n";
    return kExitOk;
}

inline int cmd_success_prob(const RunConfig& cfg, std::ostream& log) {
    cfg.network.validate();
    if (cfg.curve_points < 2) throw ConfigError("config: curve_points must be at least 2");
    CsvTable t({{"lambda_eff", "m^-2", "density of simultaneously transmitting controllers"},
                {"rho_closed_form", "1", "slot success probability, closed-form interference integral"},
                {"rho_quadrature", "1", "slot success probability, numerical interference integral"},
                {"noise_only", "1", "slot success probability without interference"}});
    t.comment("aoictl success-prob, path_loss = " + format_double(cfg.network.path_loss) +
              ", link_distance = " + format_double(cfg.network.link_distance) + " m");
    const double noise = noise_success_prob(cfg.network);
    for (std::size_t i = 0; i < cfg.curve_points; ++i) {
        const double lambda = cfg.network.density * static_cast<double>(i) / static_cast<double>(cfg.curve_points - 1);
        t.add_row({CsvTable::cell(lambda),
                   CsvTable::cell(slot_success_prob(cfg.network, lambda, IntegralBackend::kClosedForm)),
                   CsvTable::cell(slot_success_prob(cfg.network, lambda, IntegralBackend::kQuadrature)),
                   CsvTable::cell(noise)});
    }
    const std::filesystem::path dir(cfg.output_dir);
    write_file(dir / "success_prob.csv", t.str());
    write_json(dir / "success_prob.json", metadata("success-prob", cfg, {"success_prob.csv"}));
    log << "success-prob: " << t.rows() << " rows\n";
    return kExitOk;
}

}  // namespace aoictl
