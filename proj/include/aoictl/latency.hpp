// latency.hpp - peak latency, peak age of information, peak control latency
// and the policy-dependent current-block latency.
//
// Block indices run 1..k; index 0 is a virtual block that counts as both
// successful and controllable, so the gap back to the previous success is
// always defined.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "runlength.hpp"
#include "spatial.hpp"

namespace aoictl {

/// How the slot success probability of virtual block 0 is chosen.
enum class VirtualBlock {
    /// Block 0 ends with a success in its last slot: p0 = 1, so W0 = 0 and
    /// the gap distribution sums to one. Default.
    kBoundary,
    /// p0 := p1. The gap distribution then misses the mass q0^T...q_{k-1}^T
    /// and the expectations are no longer conditional means of a path
    /// quantity; kept for comparison.
    kFirstBlock,
};

struct BlockHistory {
    std::size_t block_length = 0;
    std::vector<double> success;       // p_i, per-slot success probability of block i
    std::vector<double> inst;          // P(block i controllable)
    std::vector<double> post_chi;      // chi(post access * rho_i)

    std::size_t size() const noexcept { return success.size(); }

    void validate() const {
        if (block_length == 0) throw DomainError("BlockHistory: block length must be positive");
        if (inst.size() != success.size() || post_chi.size() != success.size()) {
            throw DomainError("BlockHistory: sequences differ in length");
        }
        for (auto* seq : {&success, &inst, &post_chi}) {
            for (double x : *seq) detail::require_probability(x, "BlockHistory");
        }
    }
};

namespace detail {

inline double success_at(std::span<const double> p, std::size_t i, VirtualBlock mode) {
    if (i == 0) return mode == VirtualBlock::kBoundary ? 1.0 : p.front();
    return p[i - 1];
}

// (1 - q^T) q / p, continuous at p = 0 where it tends to T.
inline double weighted_odds(double p, std::size_t T) {
    if (p == 0.0) return static_cast<double>(T);
    return block_success_prob(p, T) * (1.0 - p) / p;
}

inline void check_success_history(std::span<const double> p, const char* what) {
    if (p.empty()) throw DomainError(std::string(what) + ": empty history");
    for (double x : p) require_probability(x, what);
    if (p.back() == 0.0) throw DomainError(std::string(what) + ": current block cannot succeed (p_k = 0)");
}

}  // namespace detail

/// P(kappa | Z(k) = 1) for kappa = 1..k, the gap in blocks back to the
/// previous block with a success.
inline std::vector<double> gap_distribution(std::span<const double> p, std::size_t T,
                                            VirtualBlock mode = VirtualBlock::kBoundary) {
    detail::check_success_history(p, "gap_distribution");
    const std::size_t k = p.size();
    std::vector<double> dist(k);
    double all_failed = 1.0;  // prod_{i=k-kappa+1}^{k-1} q_i^T
    for (std::size_t kappa = 1; kappa <= k; ++kappa) {
        const double pk = detail::success_at(p, k - kappa, mode);
        dist[kappa - 1] = block_success_prob(pk, T) * all_failed;
        all_failed *= block_failure_prob(pk, T);
    }
    return dist;
}

/// Expected peak latency (slots) of the first success in block k, given the
/// per-block slot success probabilities p_1..p_k.
inline double expected_peak_latency(std::span<const double> p, std::size_t T,
                                    VirtualBlock mode = VirtualBlock::kBoundary) {
    detail::check_success_history(p, "expected_peak_latency");
    const std::size_t k = p.size();
    const double Td = static_cast<double>(T);

    double gap_terms = 0.0;     // sum (1-q^T) prod q^T [q/p + T kappa]
    double failed_terms = 0.0;  // sum prod_{i=k-kappa}^{k-1} q_i^T
    double all_failed = 1.0;
    for (std::size_t kappa = 1; kappa <= k; ++kappa) {
        const double pk = detail::success_at(p, k - kappa, mode);
        gap_terms += all_failed * (detail::weighted_odds(pk, T) + block_success_prob(pk, T) * Td * kappa);
        all_failed *= block_failure_prob(pk, T);
        failed_terms += all_failed;
        if (all_failed == 0.0) break;
    }
    return gap_terms - Td * failed_terms - Td + truncated_geometric_mean(p.back(), T) + 1.0;
}

/// Expected peak age of information (slots) of the first success in block k.
inline double expected_paoi(std::span<const double> p, std::size_t T, VirtualBlock mode = VirtualBlock::kBoundary) {
    detail::check_success_history(p, "expected_paoi");
    const auto gaps = gap_distribution(p, T, mode);
    double mean_gap = 0.0;
    for (std::size_t kappa = 1; kappa <= gaps.size(); ++kappa) mean_gap += static_cast<double>(kappa) * gaps[kappa - 1];
    return static_cast<double>(T) * mean_gap + truncated_geometric_mean(p.back(), T) + 1.0;
}

inline double expected_peak_latency(const BlockHistory& hist, VirtualBlock mode = VirtualBlock::kBoundary) {
    hist.validate();
    return expected_peak_latency(hist.success, hist.block_length, mode);
}

inline double expected_paoi(const BlockHistory& hist, VirtualBlock mode = VirtualBlock::kBoundary) {
    hist.validate();
    return expected_paoi(hist.success, hist.block_length, mode);
}

/// Distribution of the peak control latency tau = 1..k at a controllable
/// block k. Only the past enters: inst_past and post_chi_past hold blocks
/// 1..k-1; block 0 is controllable by convention.
inline std::vector<double> pcl_pmf(std::span<const double> inst_past, std::span<const double> post_chi_past) {
    if (inst_past.size() != post_chi_past.size()) throw DomainError("pcl_pmf: sequences differ in length");
    const std::size_t k = inst_past.size() + 1;
    std::vector<double> weights(k);
    double survive = 1.0;  // prod_{i=k-tau+1}^{k-1} (1 - chi_C_i)
    double total = 0.0;
    for (std::size_t tau = 1; tau <= k; ++tau) {
        const std::size_t last = k - tau;  // candidate previous controllable block
        const double inst = last == 0 ? 1.0 : inst_past[last - 1];
        weights[tau - 1] = inst * survive;
        total += weights[tau - 1];
        if (last >= 1) survive *= 1.0 - post_chi_past[last - 1];
    }
    if (!(total > 0.0)) throw DomainError("pcl_pmf: no earlier block can be controllable");
    for (double& w : weights) w /= total;
    return weights;
}

/// PMF over tau for the last block of a full history (block k's own entries
/// are not used).
inline std::vector<double> pcl_pmf(const BlockHistory& hist) {
    hist.validate();
    if (hist.size() == 0) throw DomainError("pcl_pmf: empty history");
    const std::size_t past = hist.size() - 1;
    return pcl_pmf(std::span(hist.inst).first(past), std::span(hist.post_chi).first(past));
}

inline double pmf_mean(std::span<const double> pmf) {
    double mean = 0.0;
    for (std::size_t tau = 1; tau <= pmf.size(); ++tau) mean += static_cast<double>(tau) * pmf[tau - 1];
    return mean;
}

/// Expected peak control latency (blocks) at a controllable block k.
inline double expected_pcl(const BlockHistory& hist) { return pmf_mean(pcl_pmf(hist)); }

/// P(tau <= eta) for a pcl PMF over tau = 1..k.
inline double pcl_cdf(std::span<const double> pmf, double eta) {
    double sum = 0.0;
    for (std::size_t tau = 1; tau <= pmf.size() && static_cast<double>(tau) <= eta; ++tau) sum += pmf[tau - 1];
    return std::min(sum, 1.0);
}

enum Regime : std::size_t { kBlockRegime = 0, kSlotRegime = 1, kPostRegime = 2 };

/// Regime decomposition of block k for the current policy.
struct RegimeMixture {
    std::array<double, 3> fraction{};   // share of controllers per regime that transmit
    std::array<double, 3> success{};    // per-slot success probability per regime
    std::array<double, 3> posterior{};  // P(regime | block has a success)
    double block_success = 0.0;         // sum_phi fraction * (1 - q^T), the P(Z(k)=1) normalizer
    double latency = 0.0;               // current-block latency contribution, slots
    double mean_success = 0.0;          // posterior mean of the per-slot success probability
};

inline RegimeMixture current_block_latency(const BlockShape& shape, const AccessPolicy& policy, double rho,
                                           double controllable_prev) {
    policy.validate();
    detail::require_probability(rho, "current_block_latency");
    detail::require_probability(controllable_prev, "current_block_latency");
    const std::size_t T = shape.block_length();
    const double pending = 1.0 - controllable_prev;

    RegimeMixture m;
    m.fraction = {pending * policy.block, pending * (1.0 - policy.block) * policy.slot,
                  controllable_prev * policy.post};
    m.success = {rho, policy.slot * rho, policy.post * rho};

    std::array<double, 3> joint{};
    for (std::size_t r = 0; r < 3; ++r) {
        joint[r] = m.fraction[r] * block_success_prob(m.success[r], T);
        m.block_success += joint[r];
    }
    if (!(m.block_success > 0.0)) {
        throw DegeneratePolicyError("current_block_latency: no regime can transmit successfully");
    }
    for (std::size_t r = 0; r < 3; ++r) {
        m.posterior[r] = joint[r] / m.block_success;
        if (m.posterior[r] > 0.0) {
            m.latency += m.posterior[r] * truncated_geometric_mean(m.success[r], T);
            m.mean_success += m.posterior[r] * m.success[r];
        }
    }
    return m;
}

struct CdfTerms {
    double curr = 0.0;  // P(current-block latency <= eta_curr, Z(k) = 1)
    double pcl = 0.0;   // P(peak control latency <= eta_pcl, block k controllable)
};

/// Joint CDF terms of the cost. The current-block latency is deterministic
/// for a given policy, so its conditional CDF is an indicator.
inline CdfTerms cdf_terms(const RegimeMixture& mix, std::span<const double> pmf, double inst_controllable,
                          double eta_curr, double eta_pcl) {
    if (eta_curr < 0.0 || eta_pcl < 0.0) throw DomainError("cdf_terms: negative threshold");
    return {mix.latency <= eta_curr ? mix.block_success : 0.0, pcl_cdf(pmf, eta_pcl) * inst_controllable};
}

}  // namespace aoictl
