#pragma once

#include <stdexcept>
#include <string>

namespace delaygrad {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// Bad parameter range (negative variance, lambda > mu, ...).
struct InvalidArgument : Error {
    using Error::Error;
};

// The quadratic has no minimizer: the linear term has a component in ker(A).
struct UnboundedBelow : Error {
    using Error::Error;
};

// Root-based coefficient extraction is ill-conditioned; callers should fall
// back to the recurrence path.
struct NearlyRepeatedRoots : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

// A computed dominant root fell outside its analytic bracket; indicates a
// solver bug rather than a property of the input.
struct BracketViolation : Error {
    using Error::Error;
};

// A closed-form bound was evaluated outside its validity region.
struct PreconditionViolated : Error {
    using Error::Error;
};

struct BudgetExceeded : Error {
    using Error::Error;
};

}  // namespace delaygrad
