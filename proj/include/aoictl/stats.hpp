#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace aoictl {

/// Count, mean and centred second moment; merges are exact in the sense of
/// Chan et al., so chunked accumulation in a fixed order is reproducible.
class RunningStat {
public:
    void add(double x) noexcept {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    void merge(const RunningStat& other) noexcept {
        if (other.n_ == 0) return;
        if (n_ == 0) {
            *this = other;
            return;
        }
        const double n = static_cast<double>(n_ + other.n_);
        const double delta = other.mean_ - mean_;
        mean_ += delta * static_cast<double>(other.n_) / n;
        m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / n;
        n_ += other.n_;
    }

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return n_ ? mean_ : std::numeric_limits<double>::quiet_NaN(); }
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double std_error() const noexcept { return n_ ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Sample estimate reported by the simulators.
struct Estimate {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std_error = 0.0;
    std::uint64_t samples = 0;

    static Estimate from(const RunningStat& s) { return {s.mean(), s.std_error(), s.count()}; }
};

/// Standardized distance of an analytic value from an estimate. With a zero
/// standard error (degenerate sample) only round-off-level agreement gives 0.
inline double z_score(double analytic, const Estimate& e) {
    const double diff = e.mean - analytic;
    if (e.std_error > 0.0) return diff / e.std_error;
    if (std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(analytic))) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

}  // namespace aoictl
