#pragma once

#include <stdexcept>
#include <string>

namespace evf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user-supplied configuration (flags, config file, argument values).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (CSV parsing, joins, splits).
class DataError : public Error {
public:
    using Error::Error;
};

/// Shape mismatch between numeric operands.
class DimensionError : public DataError {
public:
    using DataError::DataError;
};

/// File format problems: corruption, truncation, unknown versions.
class IoError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite value.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, int epoch)
        : Error(msg), epoch(epoch) {}
    int epoch;
};

}  // namespace evf
