#pragma once

#include <stdexcept>
#include <string>

namespace inert {

/// Malformed or out-of-contract input (bad grid, negative K, missing file...).
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to deliver a trustworthy result.
class numerical_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Picard iteration exhausted its budget; carries the last sup-norm change.
class convergence_error : public numerical_failure {
public:
    convergence_error(const std::string& what, double residual)
        : numerical_failure(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Heat mass left the PDE domain (truncation too tight or unstable step).
class mass_drift_error : public numerical_failure {
public:
    mass_drift_error(const std::string& what, double drift)
        : numerical_failure(what), drift_(drift) {}

    double drift() const noexcept { return drift_; }

private:
    double drift_;
};

}  // namespace inert
