// spatial.hpp - Poisson-field interference and the slot success probability.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "rng.hpp"

namespace aoictl {

/// Physical constants of the network. Powers in watts, lengths in meters.
struct NetworkParams {
    double density = 1e-4;        // controllers per m^2
    double path_loss = 3.0;       // exponent, > 2
    double sinr_threshold = 0.1;  // linear
    double tx_power = 10.0;       // 40 dBm
    double noise_power = 1e-17;
    double link_distance = 25.0;

    void validate() const {
        auto positive = [](double x, const char* name) {
            if (!(x > 0.0) || !std::isfinite(x)) {
                throw ConfigError(std::string("NetworkParams: ") + name + " must be positive and finite");
            }
        };
        positive(density, "density");
        positive(sinr_threshold, "sinr_threshold");
        positive(tx_power, "tx_power");
        positive(noise_power, "noise_power");
        positive(link_distance, "link_distance");
        if (!(path_loss > 2.0) || !std::isfinite(path_loss)) {
            throw ConfigError("NetworkParams: path_loss must exceed 2, the interference integral diverges otherwise");
        }
    }
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Per-block access probabilities: block access and slot access for
/// controllers that are not yet controllable, slot access for those that are.
struct AccessPolicy {
    double block = 0.0;
    double slot = 0.0;
    double post = 0.0;

    void validate() const {
        detail::require_probability(block, "AccessPolicy.block");
        detail::require_probability(slot, "AccessPolicy.slot");
        detail::require_probability(post, "AccessPolicy.post");
    }

    friend bool operator==(const AccessPolicy&, const AccessPolicy&) = default;
};

struct RegimeDensities {
    double block = 0.0;
    double slot = 0.0;
    double post = 0.0;

    double total() const noexcept { return block + slot + post; }
};

/// Thinned densities of transmitting controllers in block k, given the
/// fraction already controllable after block k-1 (0 for the first block).
inline RegimeDensities effective_densities(const NetworkParams& params, const AccessPolicy& policy,
                                           double controllable_prev) {
    policy.validate();
    detail::require_probability(controllable_prev, "effective_densities");
    const double pending = 1.0 - controllable_prev;
    return {pending * policy.block * params.density,
            pending * (1.0 - policy.block) * policy.slot * params.density,
            controllable_prev * policy.post * params.density};
}

enum class IntegralBackend { kClosedForm, kQuadrature };

/// Interference integral  int_0^inf g r^-a / (r0^-a + g r^-a) r dr.
inline double interference_integral_closed(const NetworkParams& params) {
    params.validate();
    const double a = params.path_loss;
    const double scale = params.link_distance * params.link_distance * std::pow(params.sinr_threshold, 2.0 / a);
    return scale * (std::numbers::pi / a) / std::sin(2.0 * std::numbers::pi / a);
}

/// Same integral by adaptive Gauss-Kronrod. With u = r / (r0 g^(1/a)) the
/// integrand becomes u / (1 + u^a). [0,1] is integrated directly, [1,U] in
/// log u, and the tail beyond U by its convergent series in U^-a.
inline double interference_integral_quadrature(const NetworkParams& params) {
    params.validate();
    using boost::math::quadrature::gauss_kronrod;
    const double a = params.path_loss;
    constexpr double kTol = 1e-14;
    constexpr unsigned kDepth = 30;

    const double head = gauss_kronrod<double, 61>::integrate(
        [a](double u) { return u / (1.0 + std::pow(u, a)); }, 0.0, 1.0, kDepth, kTol);

    const double log_upper = 40.0 / a;  // U^-a = e^-40
    const double body = gauss_kronrod<double, 61>::integrate(
        [a](double s) {
            const double u = std::exp(s);
            return u * u / (1.0 + std::pow(u, a));
        },
        0.0, log_upper, kDepth, kTol);

    const double upper = std::exp(log_upper);
    double tail = 0.0;
    for (int n = 0; n < 50; ++n) {
        const double term = std::pow(upper, 2.0 - a - n * a) / ((n + 1) * a - 2.0);
        tail += (n % 2 == 0) ? term : -term;
        if (term < 1e-300) break;
    }

    const double scale = params.link_distance * params.link_distance * std::pow(params.sinr_threshold, 2.0 / a);
    return scale * (head + body + tail);
}

/// Noise-only success probability of the typical link.
inline double noise_success_prob(const NetworkParams& params) {
    params.validate();
    return std::exp(-params.sinr_threshold * params.noise_power *
                    std::pow(params.link_distance, params.path_loss) / params.tx_power);
}

/// Success probability of a transmitting typical controller when interferers
/// form a PPP of density lambda_eff, under unit-mean Rayleigh power fading.
inline double slot_success_prob(const NetworkParams& params, double lambda_eff,
                                IntegralBackend backend = IntegralBackend::kClosedForm) {
    params.validate();
    if (!(lambda_eff >= 0.0)) throw DomainError("slot_success_prob: negative interferer density");
    const double integral = backend == IntegralBackend::kClosedForm ? interference_integral_closed(params)
                                                                    : interference_integral_quadrature(params);
    return noise_success_prob(params) * std::exp(-2.0 * std::numbers::pi * lambda_eff * integral);
}

/// Default simulation disk: 50 mean interferer spacings, 5 km at 1e-4 m^-2.
/// Missing far-field interference shrinks like R^(2-alpha).
inline double default_disk_radius(double lambda_eff) {
    return lambda_eff > 0.0 ? 50.0 / std::sqrt(lambda_eff) : 0.0;
}

namespace detail {

// u^(-a/2), with the common exponents spelled out to avoid pow.
inline double inverse_power_of_square(double u, double a) {
    if (a == 3.0) return 1.0 / (u * std::sqrt(u));
    if (a == 4.0) return 1.0 / (u * u);
    return std::pow(u, -0.5 * a);
}

}  // namespace detail

/// One draw of the SINR event at the typical receiver: PPP interferers of
/// density lambda_eff uniformly on a disk, exponential fading on every link.
inline bool sample_sinr_success(const NetworkParams& params, double lambda_eff, RandomStream& rng,
                                double disk_radius) {
    const double a = params.path_loss;
    const double signal = rng.exponential() * std::pow(params.link_distance, -a);
    // success iff signal > gamma (N0/xi + sum h_j r_j^-a)
    const double budget = signal / params.sinr_threshold - params.noise_power / params.tx_power;
    if (budget <= 0.0) return false;
    if (lambda_eff <= 0.0 || disk_radius <= 0.0) return true;

    const double mean_count = lambda_eff * std::numbers::pi * disk_radius * disk_radius;
    const auto count = std::poisson_distribution<std::int64_t>(mean_count)(rng);
    // r^-a = R^-a u^(-a/2) for r = R sqrt(u); scale the budget instead of every term
    const double scaled_budget = budget * std::pow(disk_radius, a);
    double interference = 0.0;
    for (std::int64_t j = 0; j < count; ++j) {
        interference += rng.exponential() * detail::inverse_power_of_square(1.0 - rng.uniform(), a);
        if (interference >= scaled_budget) return false;
    }
    return true;
}

}  // namespace aoictl
