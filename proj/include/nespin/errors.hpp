// errors.hpp — Exception taxonomy. Validation errors mean the request was
// malformed; numerical errors mean a well-formed computation failed.

#pragma once

#include <stdexcept>
#include <string>

namespace nespin {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operator or state dimensions do not match the requested operation.
struct DimensionError : ValidationError {
    using ValidationError::ValidationError;
};

// Arguments outside the physical domain (negative field, invalid m, ...).
struct DomainError : ValidationError {
    using ValidationError::ValidationError;
};

// Requested mode is meaningless for the given noise axis.
struct ModeError : ValidationError {
    using ValidationError::ValidationError;
};

// Problem size exceeds the exact-computation cap.
struct SizeError : ValidationError {
    using ValidationError::ValidationError;
};

// Numeric eigenvector could not be matched to an adiabatic label.
struct LabelMatchError : NumericalError {
    using NumericalError::NumericalError;
};

// Adaptive integrator could not meet tolerance above the minimum step.
struct IntegrationError : NumericalError {
    using NumericalError::NumericalError;
};

// A Lindblad generator violated trace preservation or positivity.
struct GeneratorError : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace nespin
