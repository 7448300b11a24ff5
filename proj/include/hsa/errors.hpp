#ifndef HSA_ERRORS_HPP
#define HSA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hsa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition or contract on an argument was violated.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Sequences that must share a length (or sample rate) do not.
class DimensionError : public ContractError {
public:
    using ContractError::ContractError;
};

/// Input lacks the extrema needed to build envelopes (at least two maxima
/// and two minima). EMD uses this to terminate.
class NotSiftableError : public Error {
public:
    using Error::Error;
};

/// A numeric failure: division by a vanishing envelope, all samples masked, ...
class NumericError : public Error {
public:
    using Error::Error;
};

/// A file could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A spectrum file carries a schema version this build does not understand.
class VersionError : public ParseError {
public:
    using ParseError::ParseError;
};

}  // namespace hsa

#endif  // HSA_ERRORS_HPP
