#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cournot {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-facing input: config files, constructor arguments, dimension
// mismatches. The message names the offending field(s).
struct InvalidConfigError : Error {
    explicit InvalidConfigError(const std::string& msg) : Error(msg) {}
    InvalidConfigError(const std::string& msg, std::vector<std::string> details)
        : Error(msg), violations(std::move(details)) {}

    // One entry per schema violation; parse_config collects all of them
    // instead of stopping at the first.
    std::vector<std::string> violations;
};

// A measure came out empty, non-finite, or otherwise unusable.
struct DegenerateMeasureError : Error {
    using Error::Error;
};

// KL(gamma | theta) with mass outside the support of theta.
struct DivergenceUndefinedError : Error {
    using Error::Error;
};

// A scalar prox residual has no root on the admissible branch
// (non-monotone congestion with the column mass too small).
struct RootNotBracketedError : Error {
    using Error::Error;
};

// An iterative solve ran out of iterations. Carries the last iterate and
// its residual so callers can report how close it got.
struct NonconvergenceError : Error {
    NonconvergenceError(const std::string& msg, std::vector<double> iterate,
                        double res)
        : Error(msg), last_iterate(std::move(iterate)), residual(res) {}

    std::vector<double> last_iterate;
    double residual = 0.0;
};

// A diagnostic was asked to evaluate something undefined, e.g. a singular
// marginal cost at a zero-mass strategy or a Gibbs residual over a
// zero-probability entry in an active row.
struct EvaluationError : Error {
    using Error::Error;
};

// A diagnostic's stated precondition does not hold (e.g. exploitability on
// a coupling whose first marginal is not mu).
struct PreconditionError : Error {
    using Error::Error;
};

// The brute-force oracle only handles very small strategy spaces.
struct OracleScopeError : Error {
    using Error::Error;
};

// Filesystem / serialization failures in the runner.
struct IoError : Error {
    using Error::Error;
};

}  // namespace cournot
