#pragma once

#include <stdexcept>
#include <string>

namespace multifit {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input geometry does not determine a unique model (collinear points,
/// rank-deficient design matrix, zero point spread, ...).
struct DegeneracyError : Error {
    using Error::Error;
};

/// A configuration value violates its documented range.
struct InvalidConfigError : Error {
    using Error::Error;
};

/// A file could not be parsed; the message carries path and line number.
struct ParseError : Error {
    using Error::Error;
};

/// Hypothesis generation or selection ran out of usable hypotheses.
struct NoHypothesesError : Error {
    using Error::Error;
};

/// Command line arguments are inconsistent with the chosen method.
struct UsageError : Error {
    using Error::Error;
};

}  // namespace multifit
