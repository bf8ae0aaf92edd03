#pragma once

#include <stdexcept>
#include <string>

namespace adoptsub {

/// Parameters that break a basic model invariant (u_min < u_max, gamma > 0, ...).
class InvalidParameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The interior equilibrium x°(c) is undefined because u_max == u_min + e.
class SingularParameters : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A level passed as an equilibrium does not satisfy h(x) == x.
class NotAnEquilibrium : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The scenario lies outside the regime the subsidy planners are defined on.
/// what() names the violated inequality.
class AssumptionViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Subsidy level at or below the minimum s-hat: the dynamics never reach x°(c).
class InfeasibleSubsidy : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation requested before a trajectory's start time.
class TimeBeforeStart : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Oracle integrator step outside its accuracy envelope.
class InvalidStep : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace adoptsub
