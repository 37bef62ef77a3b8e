#pragma once

#include <stdexcept>
#include <string>

namespace qci {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model, profile, region or experiment parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation (zero covector, point off chart, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Generating-function evaluation at a turning point or outside the working cone.
class OutOfBandError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Eigensolver or quadrature failed to reach its tolerance.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A region boundary passes within the tie tolerance of a joint eigenvalue.
class BoundaryTieError : public Error {
public:
    explicit BoundaryTieError(const std::string& what, double distance)
        : Error(what), distance_(distance) {}
    double distance() const noexcept { return distance_; }

private:
    double distance_;
};

/// A spectral sum needs eigenvalues the spectrum was not built to contain.
class IncompleteSpectrumError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace qci
