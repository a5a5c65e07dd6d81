#pragma once

#include <stdexcept>
#include <string>

namespace fsd {

// Bad user input: malformed config, invalid parameters, out-of-range requests.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Base for runtime numerical failures (non-convergence, divergence, range
// exhaustion). Callers that map failures to process exit codes treat any
// NumericalError as "did not converge".
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adaptive quadrature missed the requested tolerance. `estimate` is the best
// value obtained (magnitude for complex integrands), `achieved` its error
// estimate.
class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double estimate_, double achieved_)
        : NumericalError(what), estimate(estimate_), achieved(achieved_) {}
    double estimate;
    double achieved;
};

// Root/fixed-point solver failed: no bracket in range, stalled iteration.
class SolverError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace fsd
