#pragma once

#include <stdexcept>
#include <string>

namespace wpdyn {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration / construction arguments.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// A constructed value violates a domain invariant (det != 1, moments, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Argument outside the domain of a tabulated quantity.
class RangeError : public Error {
  public:
    using Error::Error;
};

/// The integrated state stopped being finite.
class DivergenceError : public Error {
  public:
    DivergenceError(const std::string& what, double t) : Error(what), t_(t) {}
    double time() const noexcept { return t_; }

  private:
    double t_;
};

/// Operation not available for the given input (e.g. closed form for a ramp).
class CapabilityError : public Error {
  public:
    using Error::Error;
};

/// Kernel evaluated at (or too close to) its delta-function limit.
/// Callers should fall back to the point map x' = a x.
class DeltaLimitError : public CapabilityError {
  public:
    using CapabilityError::CapabilityError;
};

/// Grid too coarse for the momentum content of a state.
class ResolutionError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace wpdyn
