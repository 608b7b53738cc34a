// runlength.hpp - success runs in a finite Bernoulli block.
//
// chi(T, v, x) is the probability that T i.i.d. Bernoulli(x) slots contain at
// least v consecutive ones. The closed form is the classical alternating
// de Moivre sum; chi_bruteforce enumerates all 2^T sequences and serves as
// the reference for it.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace aoictl {

/// Slots per block and the run length that makes a block controllable.
class BlockShape {
public:
    BlockShape(std::size_t block_length, std::size_t run_length)
        : block_length_(block_length), run_length_(run_length) {
        if (block_length_ == 0 || run_length_ == 0) {
            throw ConfigError("BlockShape: block length and run length must be positive");
        }
        if (run_length_ > block_length_) {
            throw ConfigError("BlockShape: run length " + std::to_string(run_length_) +
                              " exceeds block length " + std::to_string(block_length_));
        }
    }

    std::size_t block_length() const noexcept { return block_length_; }
    std::size_t run_length() const noexcept { return run_length_; }

    friend bool operator==(const BlockShape&, const BlockShape&) = default;

private:
    std::size_t block_length_;
    std::size_t run_length_;
};

namespace detail {

__extension__ typedef unsigned __int128 uint128;

// Exact C(n, k) while it fits in 128 bits, floating point beyond.
inline double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    uint128 exact = 1;
    constexpr uint128 limit = ~static_cast<uint128>(0) / 4096;
    std::size_t i = 1;
    for (; i <= k; ++i) {
        if (exact > limit / (n - k + i)) break;
        exact = exact * (n - k + i) / i;  // stays integral: C(n-k+i, i)
    }
    if (i > k) return static_cast<double>(exact);
    long double approx = static_cast<long double>(exact);
    for (; i <= k; ++i) approx = approx * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return static_cast<double>(approx);
}

}  // namespace detail

/// P(a length-T Bernoulli(x) block contains a run of at least v ones).
inline double chi(const BlockShape& shape, double x) {
    detail::require_probability(x, "chi");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const std::size_t T = shape.block_length();
    const std::size_t v = shape.run_length();
    const std::size_t max_runs = (T + 1) / (v + 1);
    const double y = 1.0 - x;

    double sum = 0.0;
    for (std::size_t l = 1; l <= max_runs; ++l) {
        const std::size_t free_slots = T - l * v;
        const double boundary = x + static_cast<double>(free_slots + 1) / static_cast<double>(l) * y;
        const double term = boundary * detail::binomial(free_slots, l - 1) *
                            std::pow(x, static_cast<double>(l * v)) * std::pow(y, static_cast<double>(l - 1));
        sum += (l % 2 == 1) ? term : -term;
    }
    return std::clamp(sum, 0.0, 1.0);
}

inline constexpr std::size_t kMaxBruteforceBlock = 24;

/// True iff `bits` contains at least `run` consecutive nonzero entries.
inline bool has_run(std::span<const std::uint8_t> bits, std::size_t run) {
    std::size_t current = 0;
    for (auto b : bits) {
        current = b ? current + 1 : 0;
        if (current >= run) return true;
    }
    return run == 0;
}

/// Same quantity as chi(), by enumerating every sequence of the block.
inline double chi_bruteforce(const BlockShape& shape, double x) {
    detail::require_probability(x, "chi_bruteforce");
    const std::size_t T = shape.block_length();
    const std::size_t v = shape.run_length();
    if (T > kMaxBruteforceBlock) {
        throw DomainError("chi_bruteforce: block length " + std::to_string(T) + " exceeds " +
                          std::to_string(kMaxBruteforceBlock));
    }

    // Count qualifying sequences by number of ones, then weight once.
    std::vector<std::uint64_t> count(T + 1, 0);
    const std::uint64_t total = std::uint64_t{1} << T;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        std::uint64_t runs = mask;
        for (std::size_t s = 1; s < v && runs != 0; ++s) runs &= (mask >> s);
        if (runs != 0) ++count[static_cast<std::size_t>(__builtin_popcountll(mask))];
    }

    double sum = 0.0;
    for (std::size_t ones = 0; ones <= T; ++ones) {
        if (count[ones] == 0) continue;
        sum += static_cast<double>(count[ones]) * std::pow(x, static_cast<double>(ones)) *
               std::pow(1.0 - x, static_cast<double>(T - ones));
    }
    return sum;
}

/// q^T and 1 - q^T for q = 1 - p, accurate when p is tiny.
inline double block_failure_prob(double p, std::size_t T) {
    if (p >= 1.0) return 0.0;
    return std::exp(static_cast<double>(T) * std::log1p(-p));
}

inline double block_success_prob(double p, std::size_t T) {
    if (p >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(T) * std::log1p(-p));
}

/// E[X | block has a success]: mean number of failures before the first
/// success in a block of T slots with success probability p. By symmetry it
/// is also the mean number of failures after the last success.
inline double truncated_geometric_mean(double p, std::size_t T) {
    detail::require_probability(p, "truncated_geometric_mean");
    if (p == 0.0) throw DomainError("truncated_geometric_mean: p = 0, no block can succeed");
    if (T == 0) throw DomainError("truncated_geometric_mean: empty block");
    if (p == 1.0) return 0.0;

    const double q = 1.0 - p;
    if (T > 64 && p >= 1e-3) {
        return q / p - static_cast<double>(T) * block_failure_prob(p, T) / block_success_prob(p, T);
    }
    // q/p and T q^T/(1-q^T) cancel for small p and for short blocks; the
    // ratio of positive sums does not.
    double num = 0.0, den = 0.0, qn = 1.0;
    for (std::size_t n = 0; n < T; ++n) {
        num += static_cast<double>(n) * qn;
        den += qn;
        qn *= q;
    }
    return num / den;
}

}  // namespace aoictl
