#pragma once

#include <optional>

#include "adoptsub/linear_ode.hpp"
#include "adoptsub/model_params.hpp"
#include "adoptsub/trajectory.hpp"

namespace adoptsub {

/// In-band dynamics at cost c': slope (e + u_min - u_max)/(u_max - u_min),
/// intercept (u_max - c')/(u_max - u_min).
LinearODE band_ode(double effective_cost, const ModelParams& params);

/// In-band solution x̂(t | t0, x0, c'). Only meaningful while the path stays
/// within [band_low, band_high]; the trajectory builder enforces that.
double xhat(double t, double t0, double x0, double effective_cost, const ModelParams& params);

/// Inverse of xhat: the time the in-band solution reaches x, or nullopt.
std::optional<double> that(double x, double t0, double x0, double effective_cost,
                           const ModelParams& params);

struct BandExitTimes {
  std::optional<double> to_low;   // reaches (c' - u_max)/e
  std::optional<double> to_high;  // reaches (c' - u_min)/e
};

/// Durations (from 0) for the in-band solution started at x0 to reach either
/// band edge. Requires e > 0.
BandExitTimes band_exit_times(double x0, double effective_cost, const ModelParams& params);

/// Exact unsubsidised path from (t0, x0), x0 in [0, 1]. With e == 0 this is
/// the single-segment no-externality solution. When u_max == u_min + e the
/// in-band segment is a linear drift.
PiecewiseTrajectory unsubsidized_trajectory(const ModelParams& params, double t0, double x0);

/// No-externality path x(t) = F - (F - x0) exp(-gamma (t - t0)), F = ccdf(c).
PiecewiseTrajectory noext_trajectory(double ccdf_at_cost, double gamma, double t0, double x0);

}  // namespace adoptsub
