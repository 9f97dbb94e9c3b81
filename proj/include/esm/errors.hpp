#pragma once

#include <stdexcept>
#include <string>

namespace esm {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed configuration text: bad syntax, unknown key, unparseable token.
/// Carries the 1-based line number (0 for command-line overrides).
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A structural invariant or precondition does not hold.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// build_pad is smaller than a polynomial degree it must accommodate.
class PadTooSmall : public ValidationError {
 public:
  explicit PadTooSmall(const std::string& msg) : ValidationError(msg) {}
};

/// Operands have incompatible dimensions.
class DimMismatch : public ValidationError {
 public:
  explicit DimMismatch(const std::string& msg) : ValidationError(msg) {}
};

/// An operation requiring a Hermitian operator received a non-Hermitian one.
class NotHermitian : public ValidationError {
 public:
  explicit NotHermitian(const std::string& msg) : ValidationError(msg) {}
};

/// Base class for runtime numerical failures (as opposed to bad inputs).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

/// The iterative eigensolver exceeded its iteration cap.
class NoConvergence : public NumericalError {
 public:
  explicit NoConvergence(const std::string& msg) : NumericalError(msg) {}
};

/// A perturbed Hamiltonian failed the ground-state truncation check.
class StabilityFailure : public NumericalError {
 public:
  explicit StabilityFailure(const std::string& msg) : NumericalError(msg) {}
};

/// Finite-difference steps so small that the stencil output is dominated by
/// cancellation noise.
class StencilDegenerate : public NumericalError {
 public:
  explicit StencilDegenerate(const std::string& msg) : NumericalError(msg) {}
};

/// Closed-form harmonic formulas evaluated outside their stability domain.
class UnstableNu : public NumericalError {
 public:
  explicit UnstableNu(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace esm
