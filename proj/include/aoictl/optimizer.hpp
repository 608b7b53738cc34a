// optimizer.hpp - per-block grid search over access policies and the
// horizon driver that threads controllability state and histories.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "controllability.hpp"
#include "errors.hpp"
#include "latency.hpp"
#include "parallel.hpp"
#include "runlength.hpp"
#include "spatial.hpp"

namespace aoictl {

enum class CdfMode {
    kIndicator,  // P(latency <= eta | Z=1) is 0 or 1 for a fixed policy
    kGridRank,   // replaced by the share of grid candidates with no smaller latency
};

enum class HistoryScalar {
    kPosteriorMean,  // sum_phi P(phi | Z=1) p_phi
    kPendingAccess,  // block * rho + (1 - block) * slot * rho
};

struct OptimizerConfig {
    double grid_step = 0.05;
    double rho1 = 0.5;
    double rho2 = 0.5;
    double eta_curr = 3.0;  // slots
    double eta_pcl = 3.0;   // blocks
    std::size_t horizon = 400;
    CdfMode cdf_mode = CdfMode::kIndicator;
    HistoryScalar history = HistoryScalar::kPosteriorMean;
    VirtualBlock virtual_block = VirtualBlock::kBoundary;
    unsigned threads = 1;

    /// Number of grid values per axis minus one.
    std::size_t grid_intervals() const {
        if (!(grid_step > 0.0) || grid_step > 1.0) throw ConfigError("grid_step must lie in (0, 1]");
        const double n = std::round(1.0 / grid_step);
        if (std::abs(n * grid_step - 1.0) > 1e-9) throw ConfigError("grid_step must divide 1");
        return static_cast<std::size_t>(n);
    }

    void validate() const {
        grid_intervals();
        if (!(rho1 > 0.0 && rho1 < 1.0) || !(rho2 > 0.0 && rho2 < 1.0)) {
            throw ConfigError("cost weights rho1, rho2 must lie in (0, 1)");
        }
        if (!(eta_curr >= 0.0) || !(eta_pcl >= 0.0)) throw ConfigError("latency thresholds must be nonnegative");
        if (horizon == 0) throw ConfigError("horizon must be at least one block");
    }
};

struct Scenario {
    NetworkParams network;
    BlockShape shape{5, 2};
    OptimizerConfig config;

    void validate() const {
        network.validate();
        config.validate();
    }
};

/// Everything computed for one candidate policy in one block.
struct MetricsRecord {
    std::size_t block = 0;
    AccessPolicy policy;
    RegimeDensities densities;
    double rho = 0.0;
    double first_time = 0.0;
    double controllable = 0.0;
    double inst_controllable = 0.0;
    double post_chi = 0.0;
    bool degenerate = false;  // no regime transmits; latency undefined
    RegimeMixture mixture;
    double pcl_mean = 0.0;
    CdfTerms cdf;
    double cost = 0.0;
    // Filled by run_horizon for the chosen policy only.
    double history_success = std::numeric_limits<double>::quiet_NaN();
    double peak_latency = std::numeric_limits<double>::quiet_NaN();
    double paoi = std::numeric_limits<double>::quiet_NaN();
};

/// Candidate-independent inputs for block k: the state after block k-1 and
/// the peak-control-latency distribution, which depends on the past only.
struct BlockContext {
    std::size_t block = 1;
    double controllable_prev = 0.0;
    std::vector<double> pcl_pmf{1.0};
    double pcl_mean = 1.0;
    double pcl_cdf = 1.0;  // P(tau <= eta_pcl | controllable)
};

/// `past` holds blocks 1..k-1.
inline BlockContext make_context(const Scenario& sc, double controllable_prev, const BlockHistory& past) {
    detail::require_probability(controllable_prev, "make_context");
    BlockContext ctx;
    ctx.block = past.size() + 1;
    ctx.controllable_prev = controllable_prev;
    ctx.pcl_pmf = pcl_pmf(past.inst, past.post_chi);
    ctx.pcl_mean = pmf_mean(ctx.pcl_pmf);
    ctx.pcl_cdf = pcl_cdf(ctx.pcl_pmf, sc.config.eta_pcl);
    return ctx;
}

inline double cost_of(const OptimizerConfig& cfg, double controllable, const CdfTerms& cdf) {
    return controllable + cfg.rho1 * cdf.curr + cfg.rho2 * cdf.pcl;
}

/// densities -> rho -> controllability -> current-block latency -> CDF terms -> cost.
inline MetricsRecord evaluate_candidate(const Scenario& sc, const BlockContext& ctx, const AccessPolicy& policy) {
    MetricsRecord rec;
    rec.block = ctx.block;
    rec.policy = policy;
    rec.densities = effective_densities(sc.network, policy, ctx.controllable_prev);
    rec.rho = slot_success_prob(sc.network, rec.densities.total());
    rec.first_time = first_time_controllability(sc.shape, policy, rec.rho);
    rec.controllable = ctx.block == 1 ? rec.first_time : advance_state(ctx.controllable_prev, rec.first_time);
    rec.post_chi = chi(sc.shape, policy.post * rec.rho);
    rec.inst_controllable =
        instantaneous_controllability(ctx.controllable_prev, rec.first_time, sc.shape, policy.post, rec.rho);
    rec.pcl_mean = ctx.pcl_mean;

    try {
        rec.mixture = current_block_latency(sc.shape, policy, rec.rho, ctx.controllable_prev);
        rec.cdf = {rec.mixture.latency <= sc.config.eta_curr ? rec.mixture.block_success : 0.0,
                   ctx.pcl_cdf * rec.inst_controllable};
    } catch (const DegeneratePolicyError&) {
        rec.degenerate = true;
        rec.mixture.latency = std::numeric_limits<double>::quiet_NaN();
        rec.cdf = {0.0, 0.0};
    }
    rec.cost = cost_of(sc.config, rec.controllable, rec.cdf);
    return rec;
}

inline MetricsRecord evaluate_candidate(const Scenario& sc, double controllable_prev, const BlockHistory& past,
                                        const AccessPolicy& policy) {
    return evaluate_candidate(sc, make_context(sc, controllable_prev, past), policy);
}

/// Replaces the indicator CDF of every candidate by its rank among the
/// non-degenerate candidates of the same block.
inline void apply_grid_rank(const OptimizerConfig& cfg, std::vector<MetricsRecord>& records) {
    std::vector<double> latencies;
    latencies.reserve(records.size());
    for (const auto& r : records) {
        if (!r.degenerate) latencies.push_back(r.mixture.latency);
    }
    std::sort(latencies.begin(), latencies.end());
    const double n = static_cast<double>(latencies.size());
    for (auto& r : records) {
        if (r.degenerate) continue;
        const auto no_smaller = latencies.end() - std::lower_bound(latencies.begin(), latencies.end(), r.mixture.latency);
        r.cdf.curr = static_cast<double>(no_smaller) / n * r.mixture.block_success;
        r.cost = cost_of(cfg, r.controllable, r.cdf);
    }
}

inline constexpr double kCostTieTolerance = 1e-12;

struct BlockDecision {
    AccessPolicy policy;
    MetricsRecord record;
};

/// All candidates of the grid in index order (block, slot, post), each axis
/// ascending.
inline std::vector<MetricsRecord> evaluate_grid(const Scenario& sc, const BlockContext& ctx) {
    const std::size_t n = sc.config.grid_intervals();
    const std::size_t side = n + 1;
    std::vector<MetricsRecord> records(side * side * side);
    const auto value = [n](std::size_t i) { return static_cast<double>(i) / static_cast<double>(n); };
    parallel_for(side, sc.config.threads, [&](std::size_t b) {
        for (std::size_t s = 0; s < side; ++s) {
            for (std::size_t c = 0; c < side; ++c) {
                records[(b * side + s) * side + c] = evaluate_candidate(sc, ctx, {value(b), value(s), value(c)});
            }
        }
    });
    if (sc.config.cdf_mode == CdfMode::kGridRank) apply_grid_rank(sc.config, records);
    return records;
}

/// Index of the maximizer under the tie order: smallest block access, then
/// largest slot access, then smallest post access; costs within
/// kCostTieTolerance are ties.
inline std::size_t select_best(const std::vector<MetricsRecord>& records, std::size_t side) {
    std::size_t best = records.size();
    double best_cost = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < side; ++b) {
        for (std::size_t s = side; s-- > 0;) {
            for (std::size_t c = 0; c < side; ++c) {
                const std::size_t idx = (b * side + s) * side + c;
                if (records[idx].cost > best_cost + kCostTieTolerance) {
                    best_cost = records[idx].cost;
                    best = idx;
                }
            }
        }
    }
    return best;
}

inline BlockDecision optimize_block(const Scenario& sc, const BlockContext& ctx) {
    const auto records = evaluate_grid(sc, ctx);
    const std::size_t side = sc.config.grid_intervals() + 1;
    const auto& rec = records[select_best(records, side)];
    return {rec.policy, rec};
}

inline BlockDecision optimize_block(const Scenario& sc, double controllable_prev, const BlockHistory& past) {
    return optimize_block(sc, make_context(sc, controllable_prev, past));
}

struct PolicyTrace {
    std::vector<MetricsRecord> blocks;
    BlockHistory history;
};

/// Scalar success probability of block k stored in the history.
inline double history_success(const OptimizerConfig& cfg, const MetricsRecord& rec) {
    if (cfg.history == HistoryScalar::kPendingAccess) {
        return rec.policy.block * rec.rho + (1.0 - rec.policy.block) * rec.policy.slot * rec.rho;
    }
    return rec.degenerate ? 0.0 : rec.mixture.mean_success;
}

/// Iterates the per-block optimization over the horizon.
inline PolicyTrace run_horizon(const Scenario& sc) {
    sc.validate();
    PolicyTrace trace;
    trace.history.block_length = sc.shape.block_length();
    trace.blocks.reserve(sc.config.horizon);
    double controllable = 0.0;

    for (std::size_t k = 1; k <= sc.config.horizon; ++k) {
        const auto decision = optimize_block(sc, make_context(sc, controllable, trace.history));
        MetricsRecord rec = decision.record;

        rec.history_success = history_success(sc.config, rec);
        trace.history.success.push_back(rec.history_success);
        trace.history.inst.push_back(rec.inst_controllable);
        trace.history.post_chi.push_back(rec.post_chi);
        if (rec.history_success > 0.0) {
            rec.peak_latency = expected_peak_latency(trace.history.success, sc.shape.block_length(),
                                                     sc.config.virtual_block);
            rec.paoi = expected_paoi(trace.history.success, sc.shape.block_length(), sc.config.virtual_block);
        }
        controllable = rec.controllable;
        trace.blocks.push_back(rec);
    }
    return trace;
}

}  // namespace aoictl
