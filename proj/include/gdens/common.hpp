#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gdens {

inline constexpr const char* version_string = "0.1.0";

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Covariance matrix failed the (jittered) Cholesky factorization.
struct NotPositiveDefinite : Error {
    using Error::Error;
};

// Envelope parameters are degenerate (sigma_min^2 <= 0 or unsupported
// functional); g estimation is still possible, envelopes are not.
struct DegenerateEnvelope : Error {
    using Error::Error;
};

// Malformed or inconsistent experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Execution policy for the Monte Carlo / curve kernels.  Serial is the
// reference implementation; Parallel runs the identical per-chunk work
// under OpenMP and must produce bitwise-identical results.
enum class Exec { Serial, Parallel };

} // namespace gdens
