// plant.hpp - LTI plant driven over the lossy downlink within one block.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "rng.hpp"
#include "runlength.hpp"

namespace aoictl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kPinvCutoff = 1e-10;

/// Moore-Penrose pseudo-inverse from an SVD; singular values below
/// kPinvCutoff * sigma_max are treated as zero.
inline Matrix pseudo_inverse(const Matrix& m, std::size_t* rank = nullptr) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = s.size() ? kPinvCutoff * s(0) : 0.0;
    Vector inv = Vector::Zero(s.size());
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) {
            inv(i) = 1.0 / s(i);
            ++r;
        }
    }
    if (rank) *rank = r;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// x(t+1) = A x(t) + B u(t) + w(t), steered to x_des in v delivered inputs.
class PlantModel {
public:
    PlantModel(Matrix a, Matrix b, Vector x_des, std::size_t v, double noise_std = 0.0)
        : a_(std::move(a)), b_(std::move(b)), x_des_(std::move(x_des)), v_(v), noise_std_(noise_std) {
        const auto n = a_.rows();
        if (n == 0 || a_.cols() != n) throw ConfigError("PlantModel: A must be square and nonempty");
        if (b_.rows() != n || b_.cols() == 0) throw ConfigError("PlantModel: B must have n rows and at least one column");
        if (x_des_.size() != n) throw ConfigError("PlantModel: x_des must have n entries");
        if (v_ == 0) throw ConfigError("PlantModel: controllability index must be positive");
        if (!(noise_std_ >= 0.0)) throw ConfigError("PlantModel: noise_std must be nonnegative");

        const auto m = b_.cols();
        psi_.resize(n, static_cast<Eigen::Index>(v_) * m);
        Matrix power = Matrix::Identity(n, n);  // A^(v-1-i) for column block i, filled from the right
        for (std::size_t i = v_; i-- > 0;) {
            psi_.middleCols(static_cast<Eigen::Index>(i) * m, m) = power * b_;
            power = a_ * power;
        }
        a_pow_v_ = power;
        std::size_t rank = 0;
        psi_pinv_ = pseudo_inverse(psi_, &rank);
        if (rank != static_cast<std::size_t>(n)) {
            throw ConfigError("PlantModel: controllability matrix is rank deficient for this v");
        }
        const Vector target = (Matrix::Identity(n, n) - a_) * x_des_;
        steady_input_ = pseudo_inverse(b_) * target;
    }

    const Matrix& a() const noexcept { return a_; }
    const Matrix& b() const noexcept { return b_; }
    const Vector& x_des() const noexcept { return x_des_; }
    std::size_t v() const noexcept { return v_; }
    double noise_std() const noexcept { return noise_std_; }
    Eigen::Index states() const noexcept { return a_.rows(); }
    Eigen::Index inputs() const noexcept { return b_.cols(); }
    const Matrix& controllability_matrix() const noexcept { return psi_; }
    const Matrix& controllability_pinv() const noexcept { return psi_pinv_; }

    /// Input held by the actuator once the target is reached: solves
    /// (I - A) x_des = B u exactly when possible, in least squares otherwise.
    const Vector& steady_input() const noexcept { return steady_input_; }

    /// Inputs u(t), ..., u(t+v-1), stacked, that move x_hat to x_des.
    std::vector<Vector> control_sequence(const Vector& x_hat) const {
        const Vector stacked = psi_pinv_ * (x_des_ - a_pow_v_ * x_hat);
        std::vector<Vector> seq(v_);
        for (std::size_t i = 0; i < v_; ++i) seq[i] = stacked.segment(static_cast<Eigen::Index>(i) * inputs(), inputs());
        return seq;
    }

    Vector step(const Vector& x, const Vector& u) const { return a_ * x + b_ * u; }

private:
    Matrix a_, b_;
    Vector x_des_;
    std::size_t v_;
    double noise_std_;
    Matrix psi_, psi_pinv_, a_pow_v_;
    Vector steady_input_;
};

/// x_hat(t) = A^(t-kT) x(kT) + sum_tau A^(t-tau-1) G(tau) B u(tau), with
/// inputs[i] and acks[i] belonging to slot kT + i and t - kT = steps.
inline Vector estimate_state(const PlantModel& model, const Vector& x_sensed, std::span<const Vector> inputs,
                             std::span<const std::uint8_t> acks, std::size_t steps) {
    if (inputs.size() < steps || acks.size() < steps) throw DomainError("estimate_state: missing inputs or acks");
    Vector x = x_sensed;
    for (std::size_t i = 0; i < steps; ++i) {
        x = model.a() * x;
        if (acks[i]) x += model.b() * inputs[i];
    }
    return x;
}

enum class Phase { kRetransmitting, kTarget, kDummy };

inline std::string_view phase_name(Phase p) {
    switch (p) {
        case Phase::kRetransmitting: return "retransmitting";
        case Phase::kTarget: return "target";
        case Phase::kDummy: return "dummy";
    }
    return "?";
}

struct SlotRecord {
    std::size_t slot = 0;  // 1-based within the block
    Phase phase = Phase::kRetransmitting;
    bool success = false;
    Vector input;     // packet content sent in this slot
    Vector estimate;  // x_hat at the end of the slot
    Vector state;     // true x at the end of the slot
};

struct BlockTrace {
    std::vector<SlotRecord> slots;
    bool controllable = false;
    std::optional<std::size_t> target_slot;  // slot whose delivery completes the v-run
    Vector final_estimate;
    Vector final_state;
};

/// Replays the in-block protocol for success flags G of one block. Before
/// the target the controller sends the current v-step sequence and, after a
/// lost packet, recomputes it from the new estimate. After v deliveries in a
/// row the estimate sits at x_des and the actuator holds the steady input
/// while dummy packets fill the block.
inline BlockTrace run_block(const PlantModel& model, const BlockShape& shape, const Vector& x_start,
                            std::span<const std::uint8_t> success, RandomStream* noise = nullptr) {
    if (shape.run_length() != model.v()) throw ConfigError("run_block: block run length differs from plant v");
    if (success.size() != shape.block_length()) throw DomainError("run_block: need one success flag per slot");
    if (x_start.size() != model.states()) throw DomainError("run_block: state dimension mismatch");

    BlockTrace trace;
    Vector x_hat = x_start, x = x_start;
    auto seq = model.control_sequence(x_hat);
    std::size_t delivered = 0;
    const Vector no_input = Vector::Zero(model.inputs());

    for (std::size_t i = 0; i < success.size(); ++i) {
        SlotRecord rec;
        rec.slot = i + 1;
        rec.success = success[i] != 0;
        Vector applied = no_input;
        if (trace.target_slot) {
            rec.phase = Phase::kDummy;
            rec.input = model.steady_input();
            applied = model.steady_input();
        } else {
            rec.input = seq[delivered];
            if (rec.success) {
                applied = seq[delivered];
                ++delivered;
            }
        }
        x_hat = model.step(x_hat, applied);
        x = model.step(x, applied);
        if (noise && model.noise_std() > 0.0) {
            std::normal_distribution<double> w(0.0, model.noise_std());
            for (Eigen::Index j = 0; j < x.size(); ++j) x(j) += w(*noise);
        }

        if (!trace.target_slot) {
            if (delivered == model.v()) {
                rec.phase = Phase::kTarget;
                trace.target_slot = rec.slot;
            } else if (!rec.success) {
                delivered = 0;
                seq = model.control_sequence(x_hat);
            }
        }
        rec.estimate = x_hat;
        rec.state = x;
        trace.slots.push_back(std::move(rec));
    }
    trace.controllable = trace.target_slot.has_value();
    trace.final_estimate = x_hat;
    trace.final_state = x;
    return trace;
}

/// Default demonstration plant: discretized double integrator, v = 2.
inline PlantModel demo_plant(double noise_std = 0.0) {
    Matrix a(2, 2);
    a << 1.0, 0.1, 0.0, 1.0;
    Matrix b(2, 1);
    b << 0.0, 1.0;
    Vector x_des(2);
    x_des << 1.0, 0.0;
    return PlantModel(a, b, x_des, 2, noise_std);
}

}  // namespace aoictl
