#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace sginf {

/// Malformed input: bad matrix file, bad scenario, bad option value.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An index outside the monoid (negative time, fractional power, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition of an analysis does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Floating-point failure inside a solver (non-convergence, overflow, ...).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Result would overflow double precision (e.g. exp of a huge generator).
class RangeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Resolvent requested at a point of the spectrum.
class SpectralPointError : public NumericalError {
 public:
  SpectralPointError(const std::string& what, std::complex<double> nearest)
      : NumericalError(what, 0.0), nearest_(nearest) {}

  std::complex<double> nearest_eigenvalue() const noexcept { return nearest_; }

 private:
  std::complex<double> nearest_;
};

}  // namespace sginf
