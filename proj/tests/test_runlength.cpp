#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <aoictl/runlength.hpp>

using namespace aoictl;

namespace {

// Independent count: probability of a v-run via the automaton over the
// current run length (states 0..v-1 plus absorbing v).
double chi_by_automaton(std::size_t T, std::size_t v, double x) {
    std::vector<double> state(v + 1, 0.0);
    state[0] = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<double> next(v + 1, 0.0);
        next[v] = state[v];
        for (std::size_t r = 0; r < v; ++r) {
            next[r + 1] += state[r] * x;
            next[0] += state[r] * (1.0 - x);
        }
        state = next;
    }
    return state[v];
}

double truncated_mean_by_sum(double p, std::size_t T) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < T; ++j) {
        const double w = p * std::pow(1.0 - p, static_cast<double>(j));
        num += static_cast<double>(j) * w;
        den += w;
    }
    return num / den;
}

}  // namespace

TEST(BlockShape, RejectsRunLongerThanBlock) {
    EXPECT_THROW(BlockShape(3, 4), ConfigError);
    EXPECT_THROW(BlockShape(0, 0), ConfigError);
    EXPECT_THROW(BlockShape(5, 0), ConfigError);
    EXPECT_NO_THROW(BlockShape(5, 5));
}

TEST(Chi, MatchesBruteForceOnFullGrid) {
    for (std::size_t T = 1; T <= 12; ++T) {
        for (std::size_t v = 1; v <= T; ++v) {
            const BlockShape shape(T, v);
            for (int i = 0; i <= 20; ++i) {
                const double x = i / 20.0;
                EXPECT_NEAR(chi(shape, x), chi_bruteforce(shape, x), 1e-12) << "T=" << T << " v=" << v << " x=" << x;
            }
        }
    }
}

TEST(Chi, MatchesAutomatonForLongBlocks) {
    for (std::size_t T : {20u, 40u, 60u}) {
        for (std::size_t v : {1u, 2u, 5u, 9u}) {
            for (double x : {0.05, 0.3, 0.5, 0.77, 0.95}) {
                EXPECT_NEAR(chi(BlockShape(T, v), x), chi_by_automaton(T, v, x), 1e-11);
            }
        }
    }
}

TEST(Chi, ClosedFormsForSmallBlocks) {
    for (double x : {0.0, 0.1, 0.35, 0.5, 0.9, 1.0}) {
        EXPECT_NEAR(chi(BlockShape(2, 2), x), x * x, 1e-15);
        EXPECT_NEAR(chi(BlockShape(3, 2), x), 2 * x * x - x * x * x, 1e-15);
        EXPECT_NEAR(chi(BlockShape(5, 3), x), 3 * std::pow(x, 3) - 2 * std::pow(x, 4), 1e-15);
        EXPECT_NEAR(chi(BlockShape(4, 1), x), 1 - std::pow(1 - x, 4), 1e-15);
    }
}

TEST(Chi, EndpointsAndMonotonicity) {
    for (std::size_t T = 1; T <= 10; ++T) {
        for (std::size_t v = 1; v <= T; ++v) {
            const BlockShape shape(T, v);
            EXPECT_EQ(chi(shape, 0.0), 0.0);
            EXPECT_EQ(chi(shape, 1.0), 1.0);
            double prev = 0.0;
            for (int i = 1; i <= 200; ++i) {
                const double c = chi(shape, i / 200.0);
                EXPECT_GE(c, prev - 1e-15);
                prev = c;
            }
        }
    }
}

TEST(Chi, RejectsProbabilitiesOutsideUnitInterval) {
    EXPECT_THROW(chi(BlockShape(5, 2), -0.1), DomainError);
    EXPECT_THROW(chi(BlockShape(5, 2), 1.5), DomainError);
    EXPECT_THROW(chi(BlockShape(5, 2), std::nan("")), DomainError);
}

TEST(HasRun, DetectsRuns) {
    const std::vector<std::uint8_t> g{0, 1, 1, 1, 0};
    EXPECT_TRUE(has_run(g, 3));
    EXPECT_FALSE(has_run(g, 4));
    EXPECT_TRUE(has_run(g, 1));
    const std::vector<std::uint8_t> none{0, 0, 0};
    EXPECT_FALSE(has_run(none, 1));
}

TEST(BlockProbabilities, ComplementAndSmallP) {
    for (double p : {0.0, 1e-12, 1e-4, 0.3, 1.0}) {
        EXPECT_NEAR(block_failure_prob(p, 5) + block_success_prob(p, 5), 1.0, 1e-15);
    }
    EXPECT_NEAR(block_success_prob(1e-12, 5), 5e-12, 1e-22);
}

TEST(TruncatedGeometric, HalfAtBlockOfFive) { EXPECT_NEAR(truncated_geometric_mean(0.5, 5), 26.0 / 31.0, 1e-15); }

TEST(TruncatedGeometric, MatchesDirectSum) {
    for (std::size_t T : {1u, 2u, 5u, 12u}) {
        for (double p : {1e-6, 1e-3, 0.01, 0.2, 0.5, 0.9, 0.999}) {
            EXPECT_NEAR(truncated_geometric_mean(p, T), truncated_mean_by_sum(p, T), 1e-12) << T << " " << p;
        }
    }
}

TEST(TruncatedGeometric, BoundedAndDecreasing) {
    for (std::size_t T : {1u, 3u, 5u, 10u}) {
        double prev = (static_cast<double>(T) - 1.0) / 2.0 + 1e-12;
        for (int i = 1; i <= 100; ++i) {
            const double g = truncated_geometric_mean(i / 100.0, T);
            EXPECT_GE(g, 0.0);
            EXPECT_LE(g, prev);
            prev = g;
        }
    }
    EXPECT_EQ(truncated_geometric_mean(1.0, 5), 0.0);
    EXPECT_THROW(truncated_geometric_mean(0.0, 5), DomainError);
}
