#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "adoptsub/adoption_model.hpp"
#include "adoptsub/affinity.hpp"
#include "adoptsub/model_params.hpp"
#include "adoptsub/trajectory.hpp"

namespace adoptsub {

// Subsidy s(t, x). Breakpoints are the times where s may jump; the
// integrators restart there and use one-sided limits on each side.
struct SubsidySchedule {
  std::function<double(double t, double x)> level;
  std::vector<double> breakpoints;

  static SubsidySchedule none();
  /// s on [start, start + duration), 0 elsewhere.
  static SubsidySchedule constant_level(double s, double start, double duration);
};

// Samples of an integrated path. Spacing is uniform between breakpoints; the
// breakpoints themselves are sample times.
struct SampledTrajectory {
  double start_time = 0.0;
  double step = 0.0;
  std::vector<double> times;
  std::vector<double> levels;

  [[nodiscard]] double end_time() const { return times.back(); }
  /// Linear interpolation; clamps to the sampled span.
  [[nodiscard]] double level_at(double t) const;
};

inline constexpr double kMaxOracleStep = 1e-2;  // gamma * dt

double default_oracle_step(const ModelParams& params);

/// Classic fixed-step RK4 for x' = gamma (ccdf(c - s(t, x) - e x) - x).
/// Throws InvalidStep unless 0 < gamma * dt <= 1e-2 and t_end > t0.
SampledTrajectory integrate_ode(const ModelParams& params, const AffinityDistribution& dist,
                                const SubsidySchedule& schedule, double t0, double x0,
                                double t_end, double dt);
/// Uniform affinities on [u_min, u_max].
SampledTrajectory integrate_ode(const ModelParams& params, const SubsidySchedule& schedule,
                                double t0, double x0, double t_end, double dt);

/// Integral of s(t, x(t)) x(t) over the sampled span: composite Simpson on
/// every breakpoint-delimited piece.
double integrate_cost(const SampledTrajectory& sampled, const SubsidySchedule& schedule);

/// Fixed points of h in [0, 1] by a sign scan of h(x) - x on `grid_n` cells
/// refined by bisection to 1e-12; stability from the sign of h(x) - x on each
/// side inside [0, 1]. grid_n >= 1000.
std::vector<Equilibrium> brute_force_equilibria(const ModelParams& params, int grid_n = 4096);

/// Central difference (f(s + h) - f(s - h)) / (2h).
template <typename F>
double finite_diff(F&& f, double s, double h) {
  return (f(s + h) - f(s - h)) / (2.0 * h);
}

/// max_i |eval(traj, t_i) - x_i| over the samples.
double max_deviation(const PiecewiseTrajectory& traj, const SampledTrajectory& sampled);

/// First time the samples cross `target`, linearly interpolated; nullopt when
/// never crossed.
std::optional<double> first_passage(const SampledTrajectory& sampled, double target);

}  // namespace adoptsub
