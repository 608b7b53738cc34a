#pragma once

#include <stdexcept>
#include <string>

namespace aoictl {

/// Argument outside the mathematical domain of an operation (probability not
/// in [0,1], zero success probability where a success is conditioned on, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid construction of a configuration object (v > T, alpha <= 2, rank
/// deficient controllability matrix, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Every access regime has zero transmit probability, so the block can never
/// contain a success.
class DegeneratePolicyError : public DomainError {
public:
    using DomainError::DomainError;
};

namespace detail {

inline void require_probability(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError(std::string(what) + ": probability " + std::to_string(x) + " outside [0,1]");
    }
}

}  // namespace detail
}  // namespace aoictl
