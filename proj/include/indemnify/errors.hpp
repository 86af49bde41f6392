#ifndef INDEMNIFY_ERRORS_HPP
#define INDEMNIFY_ERRORS_HPP

#include <stdexcept>

namespace indemnify {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input data failed a construction-time invariant.
struct ValidationError : Error {
    using Error::Error;
};

// A document could not be parsed; the message carries the path into it.
struct ParseError : Error {
    using Error::Error;
};

// Utility function evaluated outside its wealth domain.
struct DomainViolation : Error {
    using Error::Error;
};

// Adaptive quadrature could not reach the requested tolerance.
struct QuadratureError : Error {
    using Error::Error;
};

// Root bracket violated the sign pattern the model guarantees.
struct BracketFailure : Error {
    using Error::Error;
};

// A precondition derived from the model's standing assumptions failed.
struct AssumptionViolation : Error {
    using Error::Error;
};

// Denominator of the deductible sensitivity vanished: no loss mass sits
// in the moving layer.
struct DegenerateDenominator : Error {
    using Error::Error;
};

// Case analysis of the two-state layer solver hit contradictory signs.
struct CaseDispatchError : Error {
    using Error::Error;
};

// Requested premium cannot be met by any admissible indemnity.
struct InfeasiblePremium : Error {
    using Error::Error;
};

// Layered solver invoked with more background states than supported.
struct UnsupportedDimension : Error {
    using Error::Error;
};

}  // namespace indemnify

#endif
