#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vdwmech {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Arguments or configuration that violate a documented precondition.
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// Atom positions the models cannot evaluate (overlap, coincident atoms,
/// degenerate internal coordinates).
class GeometryError : public Error {
public:
  using Error::Error;
};

/// Bond graph that fails the valence sanity checks.
class TopologyError : public Error {
public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Linear algebra failure (eigensolver did not converge, singular data).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// The MBD coupling matrix has a mode below the eigenvalue floor.
class InstabilityError : public NumericalError {
public:
  InstabilityError(std::size_t mode, double eigenvalue, const std::string& msg)
      : NumericalError(msg), mode_(mode), eigenvalue_(eigenvalue) {}
  std::size_t mode() const { return mode_; }
  double eigenvalue() const { return eigenvalue_; }

private:
  std::size_t mode_;
  double eigenvalue_;
};

/// Relaxation or integration that did not reach its target.
class ConvergenceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace vdwmech
