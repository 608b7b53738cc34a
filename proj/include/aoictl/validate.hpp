// validate.hpp - analytic values against their Monte Carlo counterparts.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "emit.hpp"
#include "montecarlo.hpp"
#include "optimizer.hpp"

namespace aoictl {

inline constexpr double kZThreshold = 3.0;

struct Comparison {
    std::string name;
    std::string unit;
    double analytic = 0.0;
    Estimate estimate;
    double z = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::vector<Comparison> rows;

    bool passed() const {
        return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const Comparison& c) { return c.pass; });
    }

    CsvTable table() const {
        CsvTable t({{"name", "-", "compared quantity"},
                    {"unit", "-", "unit of analytic and mc_mean"},
                    {"analytic", "see unit", "closed-form value"},
                    {"mc_mean", "see unit", "Monte Carlo sample mean"},
                    {"mc_std_error", "see unit", "standard error of mc_mean"},
                    {"samples", "1", "number of samples behind mc_mean"},
                    {"z", "1", "(mc_mean - analytic) / mc_std_error"},
                    {"pass", "1", "1 if |z| < 3"}});
        for (const auto& c : rows) {
            t.add_row({c.name, c.unit, CsvTable::cell(c.analytic), CsvTable::cell(c.estimate.mean),
                       CsvTable::cell(c.estimate.std_error), CsvTable::cell(c.estimate.samples), CsvTable::cell(c.z),
                       CsvTable::cell(c.pass)});
        }
        return t;
    }
};

/// Time-varying slot success histories used by the latency comparisons.
inline const std::vector<std::vector<double>>& validation_histories() {
    static const std::vector<std::vector<double>> h{{0.3, 0.6, 0.1, 0.45}, {0.05, 0.9, 0.2, 0.2, 0.7}};
    return h;
}

/// Runs every comparison of the suite. perturb_rho scales each analytic rho
/// before it enters an analytic value, which must make the suite fail.
inline ValidationReport run_validation(const RunConfig& cfg) {
    const Scenario sc = cfg.scenario();
    const BlockShape shape = sc.shape;
    const unsigned threads = cfg.optimizer.threads;
    const SimulationOptions bern{cfg.episodes, cfg.seed, threads};
    const auto perturb = [&](double rho) { return std::clamp(rho * (1.0 + cfg.perturb_rho), 0.0, 1.0); };

    ValidationReport report;
    const auto add = [&](std::string name, std::string unit, double analytic, const Estimate& est) {
        const double z = z_score(analytic, est);
        report.rows.push_back({std::move(name), std::move(unit), analytic, est, z, std::abs(z) < kZThreshold});
    };

    for (double fraction : {0.25, 0.5, 1.0}) {
        const double lambda = fraction * cfg.network.density;
        const SimulationOptions opt{cfg.spatial_episodes, cfg.seed + 1, threads};
        add("sinr success, lambda_eff = " + format_double(lambda), "1",
            perturb(slot_success_prob(cfg.network, lambda)), simulate_sinr(cfg.network, lambda, opt, cfg.disk_radius));
    }

    const auto latency_rows = [&](const std::string& label, const std::vector<double>& p) {
        const auto rep = simulate_bernoulli(p, shape, bern, VirtualBlock::kBoundary);
        add("peak latency, " + label, "slots", expected_peak_latency(p, shape.block_length()), rep.peak_latency);
        add("peak age, " + label, "slots", expected_paoi(p, shape.block_length()), rep.paoi);
        return rep;
    };
    for (double p : {0.2, 0.5, 0.8}) {
        const auto rep = latency_rows("constant p = " + format_double(p), std::vector<double>(3, p));
        if (p == 0.5) add("block controllability, p = 0.5", "1", chi(shape, p), rep.run_frequency);
    }
    for (std::size_t i = 0; i < validation_histories().size(); ++i) {
        latency_rows("history " + std::to_string(i + 1), validation_histories()[i]);
    }

    // Optimized schedule: controllability chain and control latency.
    Scenario short_sc = sc;
    short_sc.config.horizon = std::max<std::size_t>(2, cfg.validate_blocks);
    const auto trace = run_horizon(short_sc);
    std::vector<BlockPlan> plan;
    std::vector<ControllabilityState> states;
    std::vector<double> inst, post_chi;
    std::optional<ControllabilityState> state;
    for (const auto& rec : trace.blocks) {
        plan.push_back({rec.policy, rec.rho});
        state = step_controllability(state, shape, rec.policy, perturb(rec.rho));
        states.push_back(*state);
        inst.push_back(state->inst_controllable);
        post_chi.push_back(chi(shape, rec.policy.post * perturb(rec.rho)));
    }
    const std::size_t K = plan.size();
    const auto ctrl = simulate_controller(plan, shape, bern);
    add("first-time controllability, block 1", "1", states[0].first_time, ctrl.first_time[0]);
    add("instantaneous controllability, block 2", "1", states[1].inst_controllable, ctrl.inst_controllable[1]);
    add("cumulative controllability, block 2", "1", states[1].controllable, ctrl.controllable[1]);

    const auto pmf = pcl_pmf(std::span(inst).first(K - 1), std::span(post_chi).first(K - 1));
    const auto renewal = simulate_renewal_pcl(inst, post_chi, bern);
    add("peak control latency (renewal chain), block " + std::to_string(K), "blocks", pmf_mean(pmf),
        renewal.pcl_mean);
    add("peak control latency (slot-level chain), block " + std::to_string(K), "blocks", pmf_mean(pmf),
        ctrl.pcl_mean);

    // Same schedule with every slot decided by an SINR draw.
    const std::vector<AccessPolicy> schedule{plan[0].policy, plan[1].policy};
    const SimulationOptions sp_opt{cfg.spatial_controller_episodes, cfg.seed + 2, threads};
    const auto spatial = simulate_spatial(cfg.network, schedule, shape, sp_opt, {Geometry::kPerSlot, cfg.disk_radius});
    add("spatial slot success given access, block 1", "1", perturb(plan[0].rho), spatial.slot_rate[0]);
    add("spatial first-time controllability, block 1", "1", states[0].first_time, spatial.controller.first_time[0]);
    add("spatial instantaneous controllability, block 2", "1", states[1].inst_controllable,
        spatial.controller.inst_controllable[1]);
    return report;
}

}  // namespace aoictl
