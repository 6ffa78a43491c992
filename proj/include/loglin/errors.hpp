#pragma once

#include <stdexcept>
#include <string>

namespace loglin {

/// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A distribution parameter violates its domain (non-SPD covariance, dof out of range, ...).
struct invalid_parameter : error {
    explicit invalid_parameter(const std::string& what) : error(what) {}
};

/// Malformed operation input (empty batch, schema mismatch, bad config field).
struct invalid_input : error {
    explicit invalid_input(const std::string& what) : error(what) {}
};

/// A conjugate update left the natural-parameter space: the posterior is not normalizable.
struct posterior_improper : error {
    explicit posterior_improper(const std::string& what) : error(what) {}
};

/// Requested moment does not exist for the given parameters.
struct mean_undefined : error {
    explicit mean_undefined(const std::string& what) : error(what) {}
};

/// Floating-point breakdown: singular solve, non-finite intermediate, diverged quadrature.
struct numerical_failure : error {
    explicit numerical_failure(const std::string& what) : error(what) {}
};

/// All importance weights underflowed to zero.
struct degenerate_weights : error {
    explicit degenerate_weights(const std::string& what) : error(what) {}
};

} // namespace loglin
