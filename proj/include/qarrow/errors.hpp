#pragma once

#include <stdexcept>
#include <string>

namespace qarrow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (e.g. t outside [0, tau]).
class DomainError : public Error { using Error::Error; };
/// A matrix or state failed its structural invariants.
class ValidationError : public Error { using Error::Error; };
/// A relative entropy or log-ratio would be infinite.
class SupportError : public Error { using Error::Error; };
/// A numerical check (unitarity, identity) exceeded its tolerance.
class ToleranceError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class GridError : public Error { using Error::Error; };
class SingularFitError : public Error { using Error::Error; };
class DegenerateFitError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace qarrow
