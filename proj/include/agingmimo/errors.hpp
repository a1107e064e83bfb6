// Exception taxonomy shared across the library. Configuration problems and
// numeric failures are kept distinct so the CLI can map them to exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace agingmimo {

// Invalid or inconsistent user-supplied parameters.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A numeric routine produced an unusable result (non-PSD covariance,
// singular system, and similar).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver ran out of iterations; carries the last residual.
class nonconvergence_error : public numeric_error {
public:
    nonconvergence_error(const std::string& what, double residual)
        : numeric_error(what), last_residual(residual) {}
    double last_residual;
};

} // namespace agingmimo
