#pragma once

#include <stdexcept>
#include <string>

namespace slipflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration. Carries the offending line (0 if unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : Error(what), line_(line), field_(std::move(field)) {}
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Invalid domain description or a degenerate generated mesh.
class MeshError : public Error {
 public:
  MeshError(const std::string& what, long cell = -1) : Error(what), cell_(cell) {}
  /// Offending cell index, or -1 when the failure is not tied to one cell.
  long cell() const noexcept { return cell_; }

 private:
  long cell_;
};

/// A precondition of an operation does not hold for its inputs.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Linear or nonlinear solver failure.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int kernel_dimension = 0)
      : Error(what), kernel_dimension_(kernel_dimension) {}
  int kernel_dimension() const noexcept { return kernel_dimension_; }

 private:
  int kernel_dimension_;
};

/// A constructed object failed one of its defining checks.
class ConstructionError : public Error {
 public:
  ConstructionError(const std::string& check, const std::string& what)
      : Error(check + ": " + what), check_(check) {}
  const std::string& check() const noexcept { return check_; }

 private:
  std::string check_;
};

}  // namespace slipflow
