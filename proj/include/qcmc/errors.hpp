#pragma once

#include <stdexcept>
#include <string>

namespace qcmc {

/// Input or configuration rejected before any computation started.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A computation could not deliver its contract (non-convergence,
/// unresolved denominator, eigenphase wrap, ...).
class ComputeError : public std::runtime_error {
public:
    explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Refused by a resource guard (memory, qubit count).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qcmc
