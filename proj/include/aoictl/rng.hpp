// rng.hpp - counter-keyed random streams.
//
// Every Monte Carlo episode draws from its own stream, keyed by (seed, episode
// index). Results therefore do not depend on how episodes are spread over
// threads.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace aoictl {

namespace detail {

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// SplitMix64 generator whose starting state is a hash of (seed, stream).
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : state_(detail::splitmix_finalize(seed + 0x632BE59BD9B4E019ULL) ^
                 detail::splitmix_finalize(stream * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return detail::splitmix_finalize(state_);
    }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Unit-mean exponential.
    double exponential() noexcept { return -std::log1p(-uniform()); }

    bool bernoulli(double p) noexcept { return uniform() < p; }

private:
    std::uint64_t state_;
};

}  // namespace aoictl
