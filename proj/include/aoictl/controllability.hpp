// controllability.hpp - block-controllability recursions (mean-field).
#pragma once

#include <optional>

#include "errors.hpp"
#include "runlength.hpp"
#include "spatial.hpp"

namespace aoictl {

struct ControllabilityState {
    std::size_t block = 0;           // k >= 1
    double controllable = 0.0;       // P(controllable in some block <= k)
    double inst_controllable = 0.0;  // P(block k itself controllable)
    double first_time = 0.0;         // P(first controllable in block k | not before)
};

/// Probability that a not-yet-controllable controller becomes controllable in
/// this block: block access sees every slot at rho, slot access sees
/// slot * rho per slot.
inline double first_time_controllability(const BlockShape& shape, const AccessPolicy& policy, double rho) {
    policy.validate();
    detail::require_probability(rho, "first_time_controllability");
    return policy.block * chi(shape, rho) + (1.0 - policy.block) * chi(shape, policy.slot * rho);
}

/// Cumulative controllability after one more block; absorbing at 1.
inline double advance_state(std::optional<double> controllable_prev, double first_time) {
    detail::require_probability(first_time, "advance_state");
    if (!controllable_prev) return first_time;
    detail::require_probability(*controllable_prev, "advance_state");
    return *controllable_prev + (1.0 - *controllable_prev) * first_time;
}

inline double instantaneous_controllability(double controllable_prev, double first_time, const BlockShape& shape,
                                            double post_access, double rho) {
    detail::require_probability(controllable_prev, "instantaneous_controllability");
    detail::require_probability(first_time, "instantaneous_controllability");
    detail::require_probability(post_access, "instantaneous_controllability");
    detail::require_probability(rho, "instantaneous_controllability");
    return (1.0 - controllable_prev) * first_time + controllable_prev * chi(shape, post_access * rho);
}

inline ControllabilityState step_controllability(const std::optional<ControllabilityState>& prev,
                                                 const BlockShape& shape, const AccessPolicy& policy, double rho) {
    const double first = first_time_controllability(shape, policy, rho);
    const double before = prev ? prev->controllable : 0.0;
    ControllabilityState next;
    next.block = prev ? prev->block + 1 : 1;
    next.first_time = first;
    next.controllable = advance_state(prev ? std::optional<double>(before) : std::nullopt, first);
    next.inst_controllable = instantaneous_controllability(before, first, shape, policy.post, rho);
    return next;
}

}  // namespace aoictl
