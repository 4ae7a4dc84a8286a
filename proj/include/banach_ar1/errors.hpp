#pragma once

#include <stdexcept>
#include <string>

namespace banach_ar1 {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or invalid arguments (exit status 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The model failed a structural gate such as stationarity (exit status 3).
class ModelGateError : public Error {
public:
    using Error::Error;
};

/// A numerical precondition failed, e.g. a vanishing eigenvalue gap (exit status 4).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Reading or writing files failed (exit status 5).
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace banach_ar1
