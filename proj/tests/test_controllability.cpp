#include <optional>
#include <random>

#include <gtest/gtest.h>

#include <aoictl/controllability.hpp>

using namespace aoictl;

// With T = v = 2, chi(x) = x^2: block access at d gives d rho^2, slot access
// at d gives (d rho)^2, so the gap is d (1 - d) rho^2.
TEST(FirstTime, BlockAccessBeatsSlotAccessAtEqualProbability) {
    const BlockShape shape(2, 2);
    for (int i = 1; i <= 9; ++i) {
        const double d = i / 10.0;
        for (double rho : {0.25, 0.5, 0.9}) {
            const double block = first_time_controllability(shape, {d, 0.0, 0.0}, rho);
            const double slot = first_time_controllability(shape, {0.0, d, 0.0}, rho);
            EXPECT_NEAR(block - slot, d * (1 - d) * rho * rho, 1e-12);
            EXPECT_GT(block, slot);
        }
    }
}

TEST(FirstTime, MixesBothAccessModes) {
    const BlockShape shape(5, 3);
    const AccessPolicy pol{0.4, 0.7, 0.2};
    const double rho = 0.8;
    EXPECT_NEAR(first_time_controllability(shape, pol, rho), 0.4 * chi(shape, 0.8) + 0.6 * chi(shape, 0.56), 1e-15);
}

TEST(Recursion, FirstBlockHasNoHistory) {
    const BlockShape shape(5, 2);
    const auto s = step_controllability(std::nullopt, shape, {0.5, 0.5, 0.5}, 0.7);
    EXPECT_EQ(s.block, 1u);
    EXPECT_DOUBLE_EQ(s.controllable, s.first_time);
    EXPECT_DOUBLE_EQ(s.inst_controllable, s.first_time);
}

TEST(Recursion, CumulativeIsMonotoneAndInstantaneousBounded) {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const BlockShape shape(5, 1 + trial % 5);
        std::optional<ControllabilityState> s;
        for (int k = 0; k < 30; ++k) {
            const AccessPolicy pol{u(gen), u(gen), u(gen)};
            const double rho = u(gen);
            const auto next = step_controllability(s, shape, pol, rho);
            const double before = s ? s->controllable : 0.0;
            EXPECT_GE(next.controllable, before);
            EXPECT_LE(next.controllable, 1.0);
            // block k controllable implies controllable by k
            EXPECT_LE(next.inst_controllable, next.controllable + 1e-15);
            // newly controllable mass is part of the instantaneous probability
            EXPECT_GE(next.inst_controllable + 1e-15, next.controllable - before);
            s = next;
        }
    }
}

TEST(Recursion, Absorbing) {
    EXPECT_EQ(advance_state(1.0, 0.3), 1.0);
    EXPECT_EQ(advance_state(0.0, 0.3), 0.3);
    EXPECT_NEAR(advance_state(0.5, 0.5), 0.75, 1e-15);
    EXPECT_THROW(advance_state(1.2, 0.3), DomainError);
}
