#pragma once

#include <stdexcept>
#include <string>

namespace flda {

// Base class for everything this library throws. The CLI maps subclasses
// to exit codes: usage errors are caught before dispatch, DataError -> 2,
// NumericalError -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data.
struct DataError : Error {
    using Error::Error;
};

// Solver / numerical failures.
struct NumericalError : Error {
    using Error::Error;
};

struct ParseError : DataError {
    using DataError::DataError;
};
struct ValidationError : DataError {
    using DataError::DataError;
};
struct ConnectivityMismatch : DataError {
    using DataError::DataError;
};
struct DimensionMismatch : DataError {
    using DataError::DataError;
};
struct LimitExceeded : DataError {
    using DataError::DataError;
};
struct SingleClassError : DataError {
    using DataError::DataError;
};
struct KernelMismatch : DataError {
    using DataError::DataError;
};
struct BasisTooSmall : DataError {
    using DataError::DataError;
};
struct NonPositivePenalty : DataError {
    using DataError::DataError;
};
struct MissingGeometry : DataError {
    using DataError::DataError;
};

struct DegenerateTriangle : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularSystem : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularCovariance : NumericalError {
    using NumericalError::NumericalError;
};
struct ConvergenceFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct MaxIterations : NumericalError {
    using NumericalError::NumericalError;
};
struct RankDeficiency : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace flda
