// montecarlo.hpp - Monte Carlo counterparts of the analytic metrics.
//
// Bernoulli tier: slot outcomes drawn from given per-block success
// probabilities. Spatial tier: Poisson interferers, Rayleigh fading and the
// SINR test at the typical receiver. Episodes are processed in fixed-size
// chunks with one random stream per episode and merged in chunk order, so
// results are identical for any thread count.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "controllability.hpp"
#include "errors.hpp"
#include "latency.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "runlength.hpp"
#include "spatial.hpp"
#include "stats.hpp"

namespace aoictl {

struct SimulationOptions {
    std::uint64_t episodes = 100'000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

inline constexpr std::uint64_t kEpisodesPerChunk = 4096;

/// Runs episode(acc, rng, index) over all episodes and merges the per-chunk
/// accumulators in chunk order. Acc needs default construction and merge().
template <class Acc, class EpisodeFn>
Acc run_episodes(const SimulationOptions& opt, std::uint64_t stream_tag, EpisodeFn&& episode) {
    if (opt.episodes == 0) throw DomainError("simulation needs at least one episode");
    const std::uint64_t chunks = (opt.episodes + kEpisodesPerChunk - 1) / kEpisodesPerChunk;
    std::vector<Acc> partial(chunks);
    parallel_for(chunks, opt.threads, [&](std::size_t c) {
        const std::uint64_t begin = c * kEpisodesPerChunk;
        const std::uint64_t end = std::min(opt.episodes, begin + kEpisodesPerChunk);
        for (std::uint64_t e = begin; e < end; ++e) {
            RandomStream rng(opt.seed ^ (stream_tag * 0xA24BAED4963EE407ULL), e);
            episode(partial[c], rng, e);
        }
    });
    Acc total;
    for (const auto& p : partial) total.merge(p);
    return total;
}

/// Per-block summary of one realized slot sequence.
struct BlockOutcome {
    bool success = false;      // Z: at least one success
    bool controllable = false;  // run of at least v successes
    std::size_t leading = 0;   // X: failures before the first success
    std::size_t trailing = 0;  // W: failures after the last success
    std::size_t successes = 0;
};

inline BlockOutcome summarize_block(std::span<const std::uint8_t> bits, std::size_t run) {
    BlockOutcome out;
    out.controllable = has_run(bits, run);
    const auto first = std::find(bits.begin(), bits.end(), std::uint8_t{1});
    if (first == bits.end()) {
        out.leading = out.trailing = bits.size();
        return out;
    }
    out.success = true;
    out.leading = static_cast<std::size_t>(first - bits.begin());
    const auto last = std::find(bits.rbegin(), bits.rend(), std::uint8_t{1});
    out.trailing = static_cast<std::size_t>(last - bits.rbegin());
    out.successes = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
    return out;
}

// ---------------------------------------------------------------------------
// Bernoulli tier: latency and age against given per-block probabilities.

struct BernoulliReport {
    Estimate slot_rate;           // per-slot success frequency in the last block
    Estimate block_success;       // Z(K)
    Estimate run_frequency;       // run of >= v ones in the last block
    Estimate peak_latency;        // E[L | Z(K)=1]
    Estimate paoi;                // E[Delta | Z(K)=1]
    Estimate paoi_minus_latency;  // paired difference on the same paths
    Estimate gap;                 // E[kappa | Z(K)=1]
    std::uint64_t unanchored = 0;  // first-block mode: no success in blocks 0..K-1
};

namespace detail {

struct BernoulliAcc {
    RunningStat slot_rate, block_success, run_frequency, peak_latency, paoi, diff, gap;
    std::uint64_t unanchored = 0;

    void merge(const BernoulliAcc& o) {
        slot_rate.merge(o.slot_rate);
        block_success.merge(o.block_success);
        run_frequency.merge(o.run_frequency);
        peak_latency.merge(o.peak_latency);
        paoi.merge(o.paoi);
        diff.merge(o.diff);
        gap.merge(o.gap);
        unanchored += o.unanchored;
    }
};

}  // namespace detail

/// Simulates blocks 1..K with i.i.d. Bernoulli(p_i) slots and measures the
/// peak latency and peak age of the first success in block K. Block 0 follows
/// `mode`: a success in its last slot (boundary) or a real block drawn with
/// p_1 (first-block; episodes without any success in 0..K-1 are counted as
/// unanchored and left out of the latency statistics).
inline BernoulliReport simulate_bernoulli(std::span<const double> p, const BlockShape& shape,
                                          const SimulationOptions& opt, VirtualBlock mode = VirtualBlock::kBoundary) {
    if (p.empty()) throw DomainError("simulate_bernoulli: empty history");
    for (double x : p) detail::require_probability(x, "simulate_bernoulli");
    const std::size_t T = shape.block_length();
    const std::size_t K = p.size();

    auto acc = run_episodes<detail::BernoulliAcc>(opt, 1, [&](detail::BernoulliAcc& a, RandomStream& rng,
                                                                std::uint64_t) {
        std::vector<std::uint8_t> bits(T);
        std::vector<BlockOutcome> blocks(K + 1);
        const std::size_t first = mode == VirtualBlock::kBoundary ? 1 : 0;
        if (mode == VirtualBlock::kBoundary) {
            blocks[0].success = true;
            blocks[0].trailing = 0;
        }
        for (std::size_t i = first; i <= K; ++i) {
            const double pi = i == 0 ? p[0] : p[i - 1];
            for (auto& b : bits) b = rng.bernoulli(pi) ? 1 : 0;
            blocks[i] = summarize_block(bits, shape.run_length());
        }

        const BlockOutcome& last = blocks[K];
        a.slot_rate.add(static_cast<double>(last.successes) / static_cast<double>(T));
        a.block_success.add(last.success ? 1.0 : 0.0);
        a.run_frequency.add(last.controllable ? 1.0 : 0.0);
        if (!last.success) return;

        std::optional<std::size_t> prev;
        for (std::size_t i = K; i-- > 0;) {
            if (blocks[i].success) {
                prev = i;
                break;
            }
        }
        if (!prev) {
            ++a.unanchored;
            return;
        }
        const double kappa = static_cast<double>(K - *prev);
        const double latency = static_cast<double>(T) * (kappa - 1.0) + static_cast<double>(blocks[*prev].trailing) +
                               static_cast<double>(last.leading) + 1.0;
        const double age = kappa * static_cast<double>(T) + static_cast<double>(last.leading) + 1.0;
        a.peak_latency.add(latency);
        a.paoi.add(age);
        a.diff.add(age - latency);
        a.gap.add(kappa);
    });

    return {Estimate::from(acc.slot_rate),    Estimate::from(acc.block_success), Estimate::from(acc.run_frequency),
            Estimate::from(acc.peak_latency), Estimate::from(acc.paoi),          Estimate::from(acc.diff),
            Estimate::from(acc.gap),          acc.unanchored};
}

// ---------------------------------------------------------------------------
// Controller chain: regime membership, controllability and control latency.

/// Access policy and conditional slot success probability of one block.
struct BlockPlan {
    AccessPolicy policy;
    double rho = 0.0;
};

struct ControllerReport {
    std::vector<Estimate> controllable;       // O_k
    std::vector<Estimate> inst_controllable;  // O~_k
    std::vector<Estimate> first_time;         // O~_k given O_{k-1} = 0
    std::vector<Estimate> pcl_pmf;            // P(tau | O~_K = 1), tau = 1..K
    Estimate pcl_mean;                        // E[tau | O~_K = 1]
};

namespace detail {

struct ControllerAcc {
    std::vector<RunningStat> controllable, inst, first;
    std::vector<RunningStat> pmf;
    RunningStat pcl_mean;

    void resize(std::size_t K) {
        if (controllable.empty()) {
            controllable.resize(K);
            inst.resize(K);
            first.resize(K);
            pmf.resize(K);
        }
    }

    void merge(const ControllerAcc& o) {
        if (o.controllable.empty()) return;
        resize(o.controllable.size());
        for (std::size_t i = 0; i < controllable.size(); ++i) {
            controllable[i].merge(o.controllable[i]);
            inst[i].merge(o.inst[i]);
            first[i].merge(o.first[i]);
            pmf[i].merge(o.pmf[i]);
        }
        pcl_mean.merge(o.pcl_mean);
    }

    ControllerReport report() const {
        ControllerReport r;
        for (const auto& s : controllable) r.controllable.push_back(Estimate::from(s));
        for (const auto& s : inst) r.inst_controllable.push_back(Estimate::from(s));
        for (const auto& s : first) r.first_time.push_back(Estimate::from(s));
        for (const auto& s : pmf) r.pcl_pmf.push_back(Estimate::from(s));
        r.pcl_mean = Estimate::from(pcl_mean);
        return r;
    }
};

// Records one controller path of block-controllability flags (index 0 = block 1).
inline void record_controller_path(ControllerAcc& a, const std::vector<std::uint8_t>& inst) {
    const std::size_t K = inst.size();
    a.resize(K);
    bool ever = false;
    std::size_t last = 0;  // most recent controllable block before the current one; 0 = virtual
    for (std::size_t k = 1; k <= K; ++k) {
        const bool now = inst[k - 1] != 0;
        if (!ever) a.first[k - 1].add(now ? 1.0 : 0.0);
        a.inst[k - 1].add(now ? 1.0 : 0.0);
        if (k == K && now) {
            const std::size_t tau = K - last;
            for (std::size_t t = 1; t <= K; ++t) a.pmf[t - 1].add(t == tau ? 1.0 : 0.0);
            a.pcl_mean.add(static_cast<double>(tau));
        }
        if (now) last = k;
        ever = ever || now;
        a.controllable[k - 1].add(ever ? 1.0 : 0.0);
    }
}

}  // namespace detail

/// Simulates the typical controller slot by slot: while not yet controllable
/// it takes block access with probability `block` (transmits every slot) or
/// slot access (transmits each slot with probability `slot`); afterwards it
/// transmits each slot with probability `post`. A transmission succeeds with
/// probability rho of its block.
inline ControllerReport simulate_controller(std::span<const BlockPlan> plan, const BlockShape& shape,
                                            const SimulationOptions& opt) {
    if (plan.empty()) throw DomainError("simulate_controller: empty plan");
    for (const auto& b : plan) {
        b.policy.validate();
        detail::require_probability(b.rho, "simulate_controller");
    }
    const std::size_t T = shape.block_length();

    auto acc = run_episodes<detail::ControllerAcc>(opt, 2, [&](detail::ControllerAcc& a, RandomStream& rng,
                                                                 std::uint64_t) {
        std::vector<std::uint8_t> bits(T), inst(plan.size());
        bool ever = false;
        for (std::size_t k = 0; k < plan.size(); ++k) {
            const auto& b = plan[k];
            double access = b.policy.post;
            if (!ever) access = rng.bernoulli(b.policy.block) ? 1.0 : b.policy.slot;
            for (auto& s : bits) s = (rng.bernoulli(access) && rng.bernoulli(b.rho)) ? 1 : 0;
            inst[k] = has_run(bits, shape.run_length()) ? 1 : 0;
            ever = ever || inst[k];
        }
        detail::record_controller_path(a, inst);
    });
    return acc.report();
}

/// Recovers the cumulative controllability P_O_{k-1} and first-time
/// probabilities pi_k implied by per-block (P_O~_k, chi_C_k) under the
/// mean-field recursion.
inline std::vector<double> implied_first_time(std::span<const double> inst, std::span<const double> post_chi) {
    if (inst.size() != post_chi.size()) throw DomainError("implied_first_time: sequences differ in length");
    std::vector<double> first(inst.size());
    double controllable = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const double pending = inst[i] - controllable * post_chi[i];  // (1 - P_O) pi
        first[i] = controllable < 1.0 ? std::clamp(pending / (1.0 - controllable), 0.0, 1.0) : post_chi[i];
        controllable = std::clamp(controllable + pending, 0.0, 1.0);
    }
    return first;
}

/// Block-level controllability chain of one controller: first controllable
/// block with probability pi_i (recovered from the inputs), every later block
/// controllable with probability chi_C_i. Reports the distribution of the
/// gap tau back to the previous controllable block (block 0 if none) at the
/// last block, conditioned on that block being controllable.
inline ControllerReport simulate_renewal_pcl(std::span<const double> inst, std::span<const double> post_chi,
                                             const SimulationOptions& opt) {
    if (inst.empty()) throw DomainError("simulate_renewal_pcl: empty history");
    for (double x : inst) detail::require_probability(x, "simulate_renewal_pcl");
    for (double x : post_chi) detail::require_probability(x, "simulate_renewal_pcl");
    const auto first = implied_first_time(inst, post_chi);

    auto acc = run_episodes<detail::ControllerAcc>(opt, 3, [&](detail::ControllerAcc& a, RandomStream& rng,
                                                                 std::uint64_t) {
        std::vector<std::uint8_t> path(inst.size());
        bool ever = false;
        for (std::size_t i = 0; i < inst.size(); ++i) {
            path[i] = rng.bernoulli(ever ? post_chi[i] : first[i]) ? 1 : 0;
            ever = ever || path[i];
        }
        detail::record_controller_path(a, path);
    });
    return acc.report();
}

// ---------------------------------------------------------------------------
// Spatial tier.

enum class Geometry {
    kPerSlot,     // fresh interferer field every slot: slots i.i.d. given the density
    kPerEpisode,  // one controller field per episode, thinned independently per slot
};

struct SpatialOptions {
    Geometry geometry = Geometry::kPerSlot;
    double disk_radius = 0.0;  // 0: default_disk_radius of the network density
};

struct SpatialReport {
    std::vector<Estimate> slot_rate;  // per block: success share of transmitted slots, averaged over episodes
    ControllerReport controller;
    std::vector<double> rho;  // analytic rho_k used for the interferer densities
};

/// Full spatial simulation of a block schedule. Interferer densities follow
/// the mean-field fractions of the analytic recursion for each block; the
/// typical controller runs the same regime logic as simulate_controller but
/// every transmission is decided by an SINR draw.
inline SpatialReport simulate_spatial(const NetworkParams& params, std::span<const AccessPolicy> schedule,
                                      const BlockShape& shape, const SimulationOptions& opt,
                                      const SpatialOptions& spatial = {}) {
    params.validate();
    if (schedule.empty()) throw DomainError("simulate_spatial: empty schedule");
    const std::size_t T = shape.block_length();

    std::vector<double> lambda_eff(schedule.size()), rho(schedule.size());
    std::optional<ControllabilityState> state;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const double prev = state ? state->controllable : 0.0;
        lambda_eff[k] = effective_densities(params, schedule[k], prev).total();
        rho[k] = slot_success_prob(params, lambda_eff[k]);
        state = step_controllability(state, shape, schedule[k], rho[k]);
    }
    const double radius = spatial.disk_radius > 0.0 ? spatial.disk_radius : default_disk_radius(params.density);

    struct Acc {
        detail::ControllerAcc controller;
        std::vector<RunningStat> slot_rate;
        void merge(const Acc& o) {
            controller.merge(o.controller);
            if (slot_rate.empty()) slot_rate.resize(o.slot_rate.size());
            for (std::size_t i = 0; i < o.slot_rate.size(); ++i) slot_rate[i].merge(o.slot_rate[i]);
        }
    };

    auto acc = run_episodes<Acc>(opt, 4, [&](Acc& a, RandomStream& rng, std::uint64_t) {
        // Field of all controllers, used in per-episode mode only.
        std::vector<double> field;
        if (spatial.geometry == Geometry::kPerEpisode) {
            const double mean = params.density * std::numbers::pi * radius * radius;
            const auto n = std::poisson_distribution<std::int64_t>(mean)(rng);
            field.resize(static_cast<std::size_t>(n));
            for (auto& r : field) r = std::pow(radius, -params.path_loss) * detail::inverse_power_of_square(1.0 - rng.uniform(), params.path_loss);
        }

        std::vector<std::uint8_t> bits(T), inst(schedule.size());
        bool ever = false;
        if (a.slot_rate.empty()) a.slot_rate.resize(schedule.size());
        for (std::size_t k = 0; k < schedule.size(); ++k) {
            std::uint64_t sent = 0, delivered = 0;
            const auto& pol = schedule[k];
            double access = pol.post;
            if (!ever) access = rng.bernoulli(pol.block) ? 1.0 : pol.slot;
            for (auto& s : bits) {
                s = 0;
                if (!rng.bernoulli(access)) continue;
                ++sent;
                bool ok;
                if (spatial.geometry == Geometry::kPerSlot) {
                    ok = sample_sinr_success(params, lambda_eff[k], rng, radius);
                } else {
                    const double signal = rng.exponential() * std::pow(params.link_distance, -params.path_loss);
                    const double budget = signal / params.sinr_threshold - params.noise_power / params.tx_power;
                    const double active = lambda_eff[k] / params.density;
                    double interference = 0.0;
                    ok = budget > 0.0;
                    for (std::size_t j = 0; ok && j < field.size(); ++j) {
                        if (!rng.bernoulli(active)) continue;
                        interference += rng.exponential() * field[j];
                        ok = interference < budget;
                    }
                }
                if (ok) {
                    s = 1;
                    ++delivered;
                }
            }
            inst[k] = has_run(bits, shape.run_length()) ? 1 : 0;
            ever = ever || inst[k];
            if (sent > 0) a.slot_rate[k].add(static_cast<double>(delivered) / static_cast<double>(sent));
        }
        detail::record_controller_path(a.controller, inst);
    });

    SpatialReport report{{}, acc.controller.report(), rho};
    for (const auto& s : acc.slot_rate) report.slot_rate.push_back(Estimate::from(s));
    return report;
}

/// Empirical success rate of single SINR draws at a fixed interferer density.
inline Estimate simulate_sinr(const NetworkParams& params, double lambda_eff, const SimulationOptions& opt,
                              double disk_radius = 0.0) {
    params.validate();
    const double radius = disk_radius > 0.0 ? disk_radius : default_disk_radius(lambda_eff);
    struct Acc {
        RunningStat s;
        void merge(const Acc& o) { s.merge(o.s); }
    };
    auto acc = run_episodes<Acc>(opt, 5, [&](Acc& a, RandomStream& rng, std::uint64_t) {
        a.s.add(sample_sinr_success(params, lambda_eff, rng, radius) ? 1.0 : 0.0);
    });
    return Estimate::from(acc.s);
}

}  // namespace aoictl
