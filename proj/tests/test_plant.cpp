#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <aoictl/plant.hpp>

using namespace aoictl;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double x : r) m(i, j++) = x;
        ++i;
    }
    return m;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

Vector rollout(const PlantModel& m, Vector x, const std::vector<Vector>& u) {
    for (const auto& ui : u) x = m.a() * x + m.b() * ui;
    return x;
}

}  // namespace

TEST(PlantModel, RejectsUncontrollablePair) {
    // second state never sees the input
    EXPECT_THROW(PlantModel(mat({{1, 0}, {0, 1}}), mat({{1}, {0}}), vec({0, 0}), 2), ConfigError);
    // controllable, but not within one step
    EXPECT_THROW(PlantModel(mat({{1, 0.1}, {0, 1}}), mat({{0}, {1}}), vec({0, 0}), 1), ConfigError);
    EXPECT_NO_THROW(PlantModel(mat({{1, 0.1}, {0, 1}}), mat({{0}, {1}}), vec({0, 0}), 2));
    EXPECT_THROW(PlantModel(mat({{1, 0}, {0, 1}}), mat({{1}}), vec({0, 0}), 2), ConfigError);
}

TEST(EstimateState, ZeroStepsReturnsSensedState) {
    const auto m = demo_plant();
    const Vector x = vec({0.3, -1});
    EXPECT_TRUE(estimate_state(m, x, {}, {}, 0).isApprox(x));
}

TEST(EstimateState, LostInputsGiveOpenLoopDrift) {
    const auto m = demo_plant();
    const Vector x = vec({0.3, -1});
    const std::vector<Vector> u(3, vec({5}));
    const std::vector<std::uint8_t> g(3, 0);
    const Matrix a3 = m.a() * m.a() * m.a();
    EXPECT_LE((estimate_state(m, x, u, g, 3) - a3 * x).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EstimateState, ScalarArithmetic) {
    const PlantModel m(mat({{0.9}}), mat({{1}}), vec({0}), 1);
    const std::vector<Vector> u{vec({0.5})};
    const std::vector<std::uint8_t> g{1};
    EXPECT_NEAR(estimate_state(m, vec({1}), u, g, 1)(0), 1.4, 1e-15);
}

TEST(ControlSequence, ScalarDeadbeat) {
    const PlantModel m(mat({{2}}), mat({{1}}), vec({0}), 1);
    const auto u = m.control_sequence(vec({3}));
    ASSERT_EQ(u.size(), 1u);
    EXPECT_NEAR(u[0](0), -6.0, 1e-12);
}

TEST(ControlSequence, FixedPointOfIdentityPlant) {
    const PlantModel m(mat({{1, 0}, {0, 1}}), mat({{1, 0}, {0, 1}}), vec({2, -1}), 2);
    const auto u = m.control_sequence(vec({2, -1}));
    EXPECT_LE((rollout(m, vec({2, -1}), u) - m.x_des()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((u[0] + u[1]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ControlSequence, RandomPairsReachTarget) {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> n(0.0, 1.0);
    int tested = 0;
    while (tested < 200) {
        Matrix a(2, 2), b(2, 1);
        for (auto* m : {&a, &b}) {
            for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = n(gen);
        }
        Vector x_des = vec({n(gen), n(gen)}), x = vec({n(gen), n(gen)});
        try {
            const PlantModel m(a, b, x_des, 2);
            const auto u = m.control_sequence(x);
            EXPECT_LE((rollout(m, x, u) - x_des).cwiseAbs().maxCoeff(), 1e-9);
            ++tested;
        } catch (const ConfigError&) {
        }
    }
}

TEST(SteadyInput, HoldsEquilibrium) {
    const Matrix a = mat({{0.5, 0.2}, {0.0, 0.8}});
    const Matrix b = mat({{1}, {1}});
    const Vector w = vec({0.7});
    const Vector x_des = (Matrix::Identity(2, 2) - a).inverse() * b * w;
    const PlantModel m(a, b, x_des, 2);
    EXPECT_LE((m.step(x_des, m.steady_input()) - x_des).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RunBlock, TimingIllustration) {
    // T = 5, v = 3, G = 0 1 1 1 0: target in slot 4, dummy in slot 5
    const PlantModel m(mat({{1, 0.1, 0}, {0, 1, 0.1}, {0, 0, 1}}), mat({{0}, {0}, {1}}), vec({0, 0, 0}), 3);
    const std::vector<std::uint8_t> g{0, 1, 1, 1, 0};
    const auto t = run_block(m, BlockShape(5, 3), vec({1, 0, 0}), g);
    ASSERT_TRUE(t.target_slot);
    EXPECT_EQ(*t.target_slot, 4u);
    EXPECT_EQ(t.slots[0].phase, Phase::kRetransmitting);
    EXPECT_EQ(t.slots[3].phase, Phase::kTarget);
    EXPECT_EQ(t.slots[4].phase, Phase::kDummy);
    EXPECT_LE((t.slots[3].estimate - m.x_des()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((t.final_estimate - m.x_des()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(t.controllable);
}

TEST(RunBlock, AllSuccessReachesTargetAtSlotV) {
    const auto m = demo_plant();
    const std::vector<std::uint8_t> g(5, 1);
    const auto t = run_block(m, BlockShape(5, 2), vec({0, 0}), g);
    ASSERT_TRUE(t.target_slot);
    EXPECT_EQ(*t.target_slot, 2u);
}

TEST(RunBlock, NoSuccessNeverLeavesRetransmission) {
    const auto m = demo_plant();
    const std::vector<std::uint8_t> g(5, 0);
    const auto t = run_block(m, BlockShape(5, 2), vec({0.5, 0}), g);
    EXPECT_FALSE(t.target_slot);
    for (const auto& s : t.slots) EXPECT_EQ(s.phase, Phase::kRetransmitting);
    EXPECT_LE((t.final_estimate - m.a() * m.a() * m.a() * m.a() * m.a() * vec({0.5, 0})).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RunBlock, EstimateMatchesEquationFourReplay) {
    // The trace's estimate is the sensed state propagated with acked inputs only.
    const auto m = demo_plant();
    const std::vector<std::uint8_t> g{1, 0, 1, 1, 0};
    const Vector x0 = vec({-0.4, 0.2});
    const auto t = run_block(m, BlockShape(5, 2), x0, g);
    std::vector<Vector> inputs;
    std::vector<std::uint8_t> acks;
    for (const auto& s : t.slots) {
        inputs.push_back(s.input);
        acks.push_back(s.phase == Phase::kDummy ? 1 : s.success);
    }
    for (std::size_t i = 0; i < t.slots.size(); ++i) {
        EXPECT_LE((estimate_state(m, x0, inputs, acks, i + 1) - t.slots[i].estimate).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(RunBlock, ControllableFlagAgreesWithRunDetector) {
    const auto m = demo_plant();
    const BlockShape shape(5, 2);
    RandomStream rng(12, 0);
    for (int i = 0; i < 100'000; ++i) {
        std::vector<std::uint8_t> g(5);
        for (auto& b : g) b = rng.bernoulli(0.5) ? 1 : 0;
        const auto t = run_block(m, shape, vec({0, 0}), g);
        ASSERT_EQ(t.controllable, has_run(g, 2));
    }
}

TEST(RunBlock, NoiseMovesStateNotEstimate) {
    const auto m = demo_plant(0.05);
    const std::vector<std::uint8_t> g{1, 1, 0, 0, 0};
    RandomStream rng(1, 1);
    const auto noisy = run_block(m, BlockShape(5, 2), Vector::Zero(2), g, &rng);
    const auto clean = run_block(m, BlockShape(5, 2), Vector::Zero(2), g);
    EXPECT_LE((noisy.final_estimate - clean.final_estimate).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_GT((noisy.final_state - clean.final_state).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RunBlock, RejectsMismatchedRunLength) {
    const auto m = demo_plant();
    const std::vector<std::uint8_t> g(5, 1);
    EXPECT_THROW(run_block(m, BlockShape(5, 3), vec({0, 0}), g), ConfigError);
}
