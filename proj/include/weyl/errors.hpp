#pragma once

#include <stdexcept>
#include <string>

namespace weyl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter combination (out-of-range exponent, bad grid size...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The phase-space grid does not certifiably contain the preimage of a region.
class ContainmentError : public Error {
public:
    using Error::Error;
};

/// A coefficient's bandwidth does not fit the Fourier truncation.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Linear-algebra failure: non-convergence, singular input, degenerate fit.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration document.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace weyl
