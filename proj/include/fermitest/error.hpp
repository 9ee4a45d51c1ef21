#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fermitest {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (point off the torus,
/// symbol touching 0 or 1, division by zero inside an expression, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed symbol expression. `offset()` is the byte offset of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A Fourier coefficient was requested beyond the alias-safe range of the
/// sampling grid.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// A matrix dimension or mode count exceeds its configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: eigen-solver failure, spectrum outside the clamping
/// window, inconsistent diagnostics.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fermitest
