#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfg {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed inputs: mismatched lengths, invalid grids, bad state shapes.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A value is outside the mathematical domain of an operation.
/// Carries the offending node index when one exists.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t node, double value)
      : Error(what), node_(node), value_(value) {}
  explicit DomainError(const std::string& what) : Error(what) {}

  std::size_t node() const { return node_; }
  double value() const { return value_; }

 private:
  std::size_t node_ = static_cast<std::size_t>(-1);
  double value_ = 0.0;
};

/// The operation is not defined for the given manifold or configuration.
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration (keys, ranges, CFL bounds).
/// Mapped to exit code 2 by the CLI.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A solver failed to converge or went unstable. Carries the last residual.
/// Mapped to exit code 3 by the CLI.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  explicit NumericalError(const std::string& what) : Error(what) {}

  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

}  // namespace mfg
