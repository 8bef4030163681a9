#pragma once

#include <stdexcept>
#include <string>

namespace edgegap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidConfig : Error {
    using Error::Error;
};
struct ConstantPotential : Error {
    using Error::Error;
};
struct NoGap : Error {
    using Error::Error;
};
struct WrongPotentialKind : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct EmptyIntersection : Error {
    using Error::Error;
};

// Numerical failures; the CLI maps these to exit code 3.
struct NumericalFailure : Error {
    using Error::Error;
};
struct ConvergenceFailure : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};
struct PrecisionExhausted : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

} // namespace edgegap
