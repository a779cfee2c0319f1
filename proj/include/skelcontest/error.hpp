#pragma once

#include <stdexcept>
#include <string>

namespace skelcontest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value passed to an operation.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace skelcontest
