#pragma once

#include <stdexcept>
#include <string>

namespace msequiv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: model files, sign matrices, option values.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to converge or hit a singularity.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace msequiv
