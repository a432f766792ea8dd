#pragma once

#include <stdexcept>
#include <string>

namespace emzv {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad index, mismatched charges, ...).
struct ContractError : Error {
    using Error::Error;
};

/// Evaluation requested at a point of the lattice Z + tau Z.
struct SingularPointError : Error {
    using Error::Error;
};

/// Numeric evaluation left its reliable range or failed to converge.
struct NumericError : Error {
    NumericError(const std::string& what, double achieved = 0.0)
        : Error(what), achieved_estimate(achieved) {}
    double achieved_estimate;
};

/// A truncation or depth/weight cap is too small for the requested quantity.
struct TruncationError : Error {
    using Error::Error;
};

/// An exact algebraic object failed a required invariance (cyclic symmetry,
/// cancellation of a pole).
struct InvarianceError : ContractError {
    using ContractError::ContractError;
};

}  // namespace emzv
