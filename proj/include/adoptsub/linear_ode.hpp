#pragma once

#include <optional>

namespace adoptsub {

// x'(t) = gamma * (slope * x + intercept)
struct LinearODE {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Exact solution at time t >= t0. For slope == 0 this is the linear drift
/// x0 + gamma * intercept * (t - t0), the slope -> 0 limit.
double solve_linear(const LinearODE& ode, double gamma, double t0, double x0, double t);

/// Time at which the solution from (t0, x0) reaches `target`, or nullopt when
/// it never does (target on the far side of the fixed point, or only reached
/// asymptotically, or only in the past).
std::optional<double> hit_time(const LinearODE& ode, double gamma, double t0, double x0,
                               double target);

}  // namespace adoptsub
