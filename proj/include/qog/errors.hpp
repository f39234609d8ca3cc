#pragma once

#include <stdexcept>
#include <string>

namespace qog {

/// Invalid argument for a physical quantity (negative frequency, s <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested quantity does not exist in the current parameter regime,
/// e.g. asking for a bound-state gradient when no bound state is formed.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed quantity violated an analytic identity beyond tolerance.
class NumericalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time stepper produced an unphysical amplitude; the step is too coarse.
class SolverDiagnosticError : public NumericalConsistencyError {
 public:
  using NumericalConsistencyError::NumericalConsistencyError;
};

/// Output could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario file or command line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(what), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace qog
