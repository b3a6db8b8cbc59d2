#pragma once
#include <stdexcept>
#include <string>

namespace mrb {

// Maps to CLI exit code 2.
struct UserError : std::runtime_error {
    explicit UserError(const std::string& m) : std::runtime_error(m) {}
};

// Problem too large for the requested backend; CLI exit code 3.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& m) : std::runtime_error(m) {}
};

// Numerical failure (non-convergence, CPTP violation, ...); CLI exit code 4.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace mrb
