#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace twostage {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem callback produced a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double t, double u);

  double t() const noexcept { return t_; }
  /// First state component at the failing point (systems report component 0).
  double u() const noexcept { return u_; }

 private:
  double t_;
  double u_;
};

/// Caller broke an operation's precondition (shape mismatch, non-positive step, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A state with NaN or Inf components was constructed.
class NonFiniteState : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

/// |beta| fell below the degeneracy guard, the scheme would divide by ~0.
class WeightDegeneracyError : public Error {
 public:
  WeightDegeneracyError(double t, double u, double tau, double c, double beta,
                        std::optional<std::size_t> step_index = std::nullopt);

  double t() const noexcept { return t_; }
  double u() const noexcept { return u_; }
  double tau() const noexcept { return tau_; }
  double c() const noexcept { return c_; }
  double beta() const noexcept { return beta_; }
  std::optional<std::size_t> step_index() const noexcept { return step_index_; }

  WeightDegeneracyError with_step_index(std::size_t index) const;

 private:
  double t_, u_, tau_, c_, beta_;
  std::optional<std::size_t> step_index_;
};

/// Requested weight mode is not defined for the problem form.
class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

/// A closed-form value failed its own defining identity.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

/// No sign change where the case analysis guarantees one.
class CaseClassificationError : public InternalConsistencyError {
 public:
  using InternalConsistencyError::InternalConsistencyError;
};

}  // namespace twostage
