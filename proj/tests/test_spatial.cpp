#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <aoictl/spatial.hpp>

using namespace aoictl;

TEST(Units, DbmWattRoundTrip) {
    EXPECT_NEAR(dbm_to_watts(40.0), 10.0, 1e-12);
    EXPECT_NEAR(dbm_to_watts(30.0), 1.0, 1e-15);
    EXPECT_NEAR(watts_to_dbm(dbm_to_watts(-113.0)), -113.0, 1e-12);
}

TEST(NetworkParams, RejectsNonPhysicalValues) {
    NetworkParams p;
    p.path_loss = 2.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.density = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.noise_power = -1.0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(EffectiveDensities, RegimeSplit) {
    const NetworkParams p;
    const AccessPolicy pol{0.3, 0.6, 0.8};
    const auto d = effective_densities(p, pol, 0.25);
    EXPECT_NEAR(d.block, 0.75 * 0.3 * 1e-4, 1e-20);
    EXPECT_NEAR(d.slot, 0.75 * 0.7 * 0.6 * 1e-4, 1e-20);
    EXPECT_NEAR(d.post, 0.25 * 0.8 * 1e-4, 1e-20);
    EXPECT_NEAR(d.total(), d.block + d.slot + d.post, 1e-22);
    EXPECT_EQ(effective_densities(p, {0, 0, 0}, 0.5).total(), 0.0);
}

TEST(InterferenceIntegral, BackendsAgree) {
    for (double alpha : {2.5, 3.0, 3.5, 4.0, 5.0}) {
        for (double r0 : {10.0, 25.0, 100.0}) {
            NetworkParams p;
            p.path_loss = alpha;
            p.link_distance = r0;
            const double closed = interference_integral_closed(p);
            const double quad = interference_integral_quadrature(p);
            EXPECT_LE(std::abs(closed - quad) / closed, 1e-9) << "alpha=" << alpha << " r0=" << r0;
        }
    }
}

TEST(InterferenceIntegral, PathLossFourHasElementaryForm) {
    // alpha = 4: the integral equals r0^2 sqrt(gamma) pi / 4
    NetworkParams p;
    p.path_loss = 4.0;
    p.sinr_threshold = 0.3;
    p.link_distance = 40.0;
    EXPECT_NEAR(interference_integral_closed(p), 1600.0 * std::sqrt(0.3) * std::numbers::pi / 4.0, 1e-9);
}

TEST(SlotSuccess, NoInterferenceIsNoiseTerm) {
    const NetworkParams p;
    const double noise = std::exp(-p.sinr_threshold * p.noise_power * std::pow(p.link_distance, p.path_loss) / p.tx_power);
    EXPECT_NEAR(slot_success_prob(p, 0.0), noise, 1e-15);
    EXPECT_NEAR(noise_success_prob(p), noise, 1e-15);
}

TEST(SlotSuccess, DecreasesWithDensityAndDistance) {
    NetworkParams p;
    double prev = 1.0;
    for (int i = 0; i <= 20; ++i) {
        const double rho = slot_success_prob(p, i * 1e-5);
        EXPECT_LE(rho, prev);
        EXPECT_GT(rho, 0.0);
        prev = rho;
    }
    NetworkParams far = p;
    far.link_distance = 60.0;
    EXPECT_LT(slot_success_prob(far, 1e-4), slot_success_prob(p, 1e-4));
}

TEST(SlotSuccess, DefaultNetworkValue) {
    // 2 pi lambda r0^2 gamma^(2/3) (pi/3) / sin(2 pi/3) with the defaults
    const NetworkParams p;
    const double integral = 625.0 * std::pow(0.1, 2.0 / 3.0) * (std::numbers::pi / 3.0) / std::sin(2.0 * std::numbers::pi / 3.0);
    const double expected = noise_success_prob(p) * std::exp(-2.0 * std::numbers::pi * 1e-4 * integral);
    EXPECT_NEAR(slot_success_prob(p, 1e-4), expected, 1e-14);
    EXPECT_NEAR(slot_success_prob(p, 1e-4), 0.902755, 1e-5);
}

TEST(SampleSinr, NoInterferersMeansNoiseOnly) {
    NetworkParams p;
    p.noise_power = 1e-3;  // noise-only success about 0.855
    RandomStream rng(3, 0);
    int hits = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) hits += sample_sinr_success(p, 0.0, rng, 1000.0) ? 1 : 0;
    const double rate = static_cast<double>(hits) / n;
    const double expected = noise_success_prob(p);
    EXPECT_NEAR(rate, expected, 4.0 * std::sqrt(expected * (1 - expected) / n));
}
