#include "adoptsub/linear_ode.hpp"

#include <cmath>

namespace adoptsub {

double solve_linear(const LinearODE& ode, double gamma, double t0, double x0, double t) {
  const double dt = t - t0;
  if (ode.slope == 0.0) return x0 + gamma * ode.intercept * dt;
  const double a = ode.slope;
  const double b = ode.intercept;
  // x0 + (a x0 + b)(e^{a gamma dt} - 1)/a; expm1 keeps short spans accurate.
  return x0 + (a * x0 + b) * std::expm1(a * gamma * dt) / a;
}

std::optional<double> hit_time(const LinearODE& ode, double gamma, double t0, double x0,
                               double target) {
  if (target == x0) return t0;
  const double a = ode.slope;
  const double b = ode.intercept;
  double t = 0.0;
  if (a == 0.0) {
    if (b == 0.0) return std::nullopt;
    t = t0 + (target - x0) / (gamma * b);
  } else {
    const double from = a * x0 + b;
    const double to = a * target + b;
    if (from == 0.0) return std::nullopt;
    const double ratio = to / from;
    if (!(ratio > 0.0)) return std::nullopt;
    t = t0 + std::log(ratio) / (gamma * a);
  }
  if (!(t >= t0) || !std::isfinite(t)) return std::nullopt;
  return t;
}

}  // namespace adoptsub
