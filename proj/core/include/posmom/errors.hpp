#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace posmom {

/// Bad argument to a constructor or free function (n = 0, empty interval, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A combination of otherwise valid parameters that the method cannot use,
/// e.g. fewer quadrature nodes than moments.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Density or temperature recovered from moments is not positive.
class NonPhysicalState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dual Newton iteration for the discrete Maxwellian failed.
class EntropyFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Gram or Vandermonde system is numerically singular.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The time step violates the CFL bound or produced negative weights.
class CflViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A per-cell solve failed during time evolution. Carries enough context
/// to reproduce the offending solve.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, long step, long cell, int pdf,
                std::vector<double> moments)
      : std::runtime_error(what),
        step_(step),
        cell_(cell),
        pdf_(pdf),
        moments_(std::move(moments)) {}

  long step() const { return step_; }
  long cell() const { return cell_; }
  int pdf() const { return pdf_; }
  const std::vector<double>& moments() const { return moments_; }

 private:
  long step_;
  long cell_;
  int pdf_;
  std::vector<double> moments_;
};

}  // namespace posmom
