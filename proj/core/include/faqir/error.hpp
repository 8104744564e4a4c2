#pragma once

#include <stdexcept>
#include <string>

namespace faqir {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, records, references).
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or parameters supplied by the caller.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Precondition violation on an in-memory argument (dimension mismatch, zero vector, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace faqir
