#include "adoptsub/closed_form.hpp"

#include <string>

#include "adoptsub/adoption_model.hpp"
#include "adoptsub/errors.hpp"

namespace adoptsub {

LinearODE band_ode(double effective_cost, const ModelParams& p) {
  const double w = p.affinity_width();
  return {(p.externality + p.u_min - p.u_max) / w, (p.u_max - effective_cost) / w};
}

double xhat(double t, double t0, double x0, double effective_cost, const ModelParams& p) {
  return solve_linear(band_ode(effective_cost, p), p.gamma, t0, x0, t);
}

std::optional<double> that(double x, double t0, double x0, double effective_cost,
                           const ModelParams& p) {
  return hit_time(band_ode(effective_cost, p), p.gamma, t0, x0, x);
}

BandExitTimes band_exit_times(double x0, double effective_cost, const ModelParams& p) {
  return {that(band_low(effective_cost, p), 0.0, x0, effective_cost, p),
          that(band_high(effective_cost, p), 0.0, x0, effective_cost, p)};
}

PiecewiseTrajectory noext_trajectory(double ccdf_at_cost, double gamma, double t0, double x0) {
  return PiecewiseTrajectory({Segment{t0, x0, ExponentialApproach{ccdf_at_cost, -gamma}}});
}

PiecewiseTrajectory unsubsidized_trajectory(const ModelParams& p, double t0, double x0) {
  p.validate();
  if (!(x0 >= 0.0 && x0 <= 1.0)) {
    throw InvalidParameters("initial adoption level must lie in [0, 1], got " +
                            std::to_string(x0));
  }
  if (p.externality == 0.0) return noext_trajectory(would_adopt(0.0, p), p.gamma, t0, x0);

  const double c = p.cost;
  const double lo = band_low(c, p);
  const double hi = band_high(c, p);
  // Outside the band h is 0 (below) or 1 (above): pure relaxation at rate gamma.
  const auto decay = [&](double t, double x) {
    return Segment{t, x, ExponentialApproach{0.0, -p.gamma}};
  };
  const auto rise = [&](double t, double x) {
    return Segment{t, x, ExponentialApproach{1.0, -p.gamma}};
  };

  // Boundary starts go to the outer region: at x == lo the flow is -gamma*lo,
  // at x == hi it is gamma*(1 - hi), so the path leaves the band immediately.
  if (x0 <= lo) return PiecewiseTrajectory({decay(t0, x0)});
  if (x0 >= hi) return PiecewiseTrajectory({rise(t0, x0)});

  const LinearODE ode = band_ode(c, p);
  std::vector<Segment> segments;
  std::optional<double> to_low;
  std::optional<double> to_high;
  if (ode.slope == 0.0) {
    segments.push_back({t0, x0, LinearDrift{p.gamma * ode.intercept}});
    if (ode.intercept > 0.0) {
      to_high = hit_time(ode, p.gamma, 0.0, x0, hi);
    } else if (ode.intercept < 0.0) {
      to_low = hit_time(ode, p.gamma, 0.0, x0, lo);
    }
  } else {
    segments.push_back({t0, x0, ExponentialApproach{interior_equilibrium(c, p),
                                                    p.gamma * ode.slope}});
    const BandExitTimes exits = band_exit_times(x0, c, p);
    to_low = exits.to_low;
    to_high = exits.to_high;
  }

  if (to_low && (!to_high || *to_low <= *to_high)) {
    segments.push_back(decay(t0 + *to_low, lo));
  } else if (to_high) {
    segments.push_back(rise(t0 + *to_high, hi));
  }
  return PiecewiseTrajectory(std::move(segments));
}

}  // namespace adoptsub
