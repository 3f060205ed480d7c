#pragma once

#include <stdexcept>
#include <string>

namespace kchemo {

/// Invalid run configuration: bad grid sizes, kernel parameters, profiles.
/// The CLI maps this to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (length mismatch, missing history).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of a model function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A time step was refused because it would break stability or positivity.
/// Carries the largest step the failing sub-step would have accepted.
class StepRejected : public std::runtime_error {
 public:
  StepRejected(std::string step, double requested_dt, double admissible_dt);

  const std::string& step() const noexcept { return step_; }
  double requested_dt() const noexcept { return requested_dt_; }
  double admissible_dt() const noexcept { return admissible_dt_; }

 private:
  std::string step_;
  double requested_dt_;
  double admissible_dt_;
};

/// The turning operator has no unique normalized nonnegative null vector.
class EquilibriumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Q(f) = phi has no solution because phi does not integrate to zero.
class SolvabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial data handed to the scaled kinetic solver is not an equilibrium.
class NotWellPrepared : public std::runtime_error {
 public:
  NotWellPrepared(double residual, double tolerance);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The epsilon sweep's resolution pilot failed; the sweep did not run.
class PilotCheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kchemo
