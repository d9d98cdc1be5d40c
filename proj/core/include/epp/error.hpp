#pragma once

#include <stdexcept>
#include <string>

namespace epp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unusable input data (CSV contents, dimensions, degenerate values).
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid argument or configuration supplied by the caller.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not produce a valid result.
class ComputeError : public Error {
public:
    using Error::Error;
};

/// A persisted document could not be read back.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace epp
