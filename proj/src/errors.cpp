#include "kchemo/errors.hpp"

#include <sstream>

namespace kchemo {

namespace {

std::string step_message(const std::string& step, double requested, double admissible) {
  std::ostringstream os;
  os.precision(6);
  os << step << " step rejected: dt=" << requested << " exceeds admissible dt=" << admissible;
  return os.str();
}

std::string prepared_message(double residual, double tolerance) {
  std::ostringstream os;
  os << "initial data is not an equilibrium of the turning operator: max |Q(f_I)| = " << residual
     << " > " << tolerance;
  return os.str();
}

}  // namespace

StepRejected::StepRejected(std::string step, double requested_dt, double admissible_dt)
    : std::runtime_error(step_message(step, requested_dt, admissible_dt)),
      step_(std::move(step)),
      requested_dt_(requested_dt),
      admissible_dt_(admissible_dt) {}

NotWellPrepared::NotWellPrepared(double residual, double tolerance)
    : std::runtime_error(prepared_message(residual, tolerance)), residual_(residual) {}

}  // namespace kchemo
