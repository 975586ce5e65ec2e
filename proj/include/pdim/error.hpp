#pragma once

#include <stdexcept>
#include <string>

namespace pdim {

// Exit status of the CLI for each failure family.
enum class ErrorKind { Usage = 1, Mathematical = 2, Numerical = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class MathError : public Error {
 public:
  explicit MathError(const std::string& what) : Error(ErrorKind::Mathematical, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// Nothing with the requested property exists in the search region.
class NotFoundError : public MathError {
 public:
  using MathError::MathError;
};

// A point violates the domain precondition of an operation.
class DomainError : public MathError {
 public:
  using MathError::MathError;
};

class EscapeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Newton converged onto a cycle whose minimal period properly divides the request.
class PeriodError : public MathError {
 public:
  PeriodError(const std::string& what, int period) : MathError(what), period_(period) {}
  int period() const noexcept { return period_; }

 private:
  int period_;
};

// A stage of a composed map left its declared domain.
class CompositionError : public MathError {
 public:
  CompositionError(const std::string& stage, const std::string& what)
      : MathError(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pdim
