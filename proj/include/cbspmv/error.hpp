#pragma once

#include <stdexcept>
#include <string>

namespace cbspmv {

/// Base class for all domain errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix and vector dimensions do not agree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed or corrupt serialized data (Matrix Market text, CBSM container, packed payload).
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace cbspmv
