#pragma once

#include <stdexcept>
#include <string>

namespace genen {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension mismatch between inputs.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A symmetric matrix is too close to singular (or indefinite) for the
/// requested operation. Carries the offending eigenvalue.
class NearSingularError : public Error {
 public:
  NearSingularError(const std::string& what, double eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

}  // namespace genen
