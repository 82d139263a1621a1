// errors.hpp: exception types shared by all modules
//
// Every error carries a machine-readable reason code. The CLI maps the two
// categories onto exit codes: validation problems exit 1, numerical
// failures exit 2.

#pragma once

#include <stdexcept>
#include <string>

namespace spinboson {

enum class ErrorCategory { validation, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string reason, const std::string& message)
        : std::runtime_error(message), category_(category), reason_(std::move(reason)) {}

    ErrorCategory category() const noexcept { return category_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    ErrorCategory category_;
    std::string reason_;
};

// Invalid configuration or model parameters.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg)
        : Error(ErrorCategory::validation, "config", msg) {}
};

// Bad argument to an operation (length mismatch, nonpositive mass, ...).
struct ArgumentError : Error {
    explicit ArgumentError(const std::string& msg)
        : Error(ErrorCategory::validation, "argument", msg) {}
};

// Operation called outside its domain (e.g. discretizing a massless model).
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& msg)
        : Error(ErrorCategory::validation, "precondition", msg) {}
};

// v is not in D(ω^{-1/2}); the spin-boson model class is not defined.
struct ModelClassError : Error {
    explicit ModelClassError(const std::string& msg)
        : Error(ErrorCategory::validation, "model_class", msg) {}
};

// Requested Fock space exceeds the memory budget.
struct CapacityError : Error {
    explicit CapacityError(const std::string& msg)
        : Error(ErrorCategory::validation, "capacity", msg) {}
};

// Evaluation outside a tabulated range.
struct RangeError : Error {
    explicit RangeError(const std::string& msg)
        : Error(ErrorCategory::validation, "range", msg) {}
};

// Solver non-convergence, failed tabulation, internal consistency failures.
struct NumericalError : Error {
    NumericalError(std::string reason, const std::string& msg)
        : Error(ErrorCategory::numerical, std::move(reason), msg) {}
};

}  // namespace spinboson
