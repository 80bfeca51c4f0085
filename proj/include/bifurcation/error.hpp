#pragma once

#include <stdexcept>
#include <string>

namespace bifurcation {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or out-of-range parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

// The model was asked to do something outside its valid regime.
class DomainError : public Error {
public:
    using Error::Error;
};

// A step factor of the second-order amplitude convention went nonpositive.
class StepDomainError : public DomainError {
public:
    using DomainError::DomainError;
};

// A log-space quantity exceeded the representable exponent range.
class SaturationError : public DomainError {
public:
    using DomainError::DomainError;
};

class DegenerateReductionError : public DomainError {
public:
    using DomainError::DomainError;
};

class EnsembleError : public DomainError {
public:
    using DomainError::DomainError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bifurcation
