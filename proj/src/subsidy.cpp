#include "adoptsub/subsidy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adoptsub/adoption_model.hpp"
#include "adoptsub/closed_form.hpp"
#include "adoptsub/errors.hpp"
#include "adoptsub/quadrature.hpp"

namespace adoptsub {
namespace {

constexpr double kQuadratureTol = 1e-12;

std::string fmt_num(double v) { return std::to_string(v); }

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

// 1/slope of the in-band ODE, (u_max - u_min)/(e + u_min - u_max).
double band_time_scale(const ModelParams& p) {
  return p.affinity_width() / (p.externality + p.u_min - p.u_max);
}

void require_level_in_range(const ModelParams& p, double level) {
  if (!(level >= 0.0 && level <= p.cost)) {
    throw InvalidParameters("subsidy level must lie in [0, cost], got " + fmt_num(level));
  }
}

}  // namespace

void ConstantLevelSubsidy::validate(double cost) const {
  if (!(level >= 0.0 && level <= cost)) {
    throw InvalidParameters("subsidy level must lie in [0, cost], got " + fmt_num(level));
  }
  if (!(duration >= 0.0)) throw InvalidParameters("subsidy duration must be >= 0");
}

// --- no externality --------------------------------------------------------

PiecewiseTrajectory noext_cls_trajectory(const AffinityDistribution& dist, double cost,
                                         double gamma, const ConstantLevelSubsidy& cls,
                                         double y0) {
  cls.validate(cost);
  const double subsidised = dist.ccdf(cost - cls.level);
  const double unsubsidised = dist.ccdf(cost);
  if (cls.duration == 0.0) {
    return PiecewiseTrajectory({Segment{cls.start, y0, ExponentialApproach{unsubsidised, -gamma}}});
  }
  Segment head{cls.start, y0, ExponentialApproach{subsidised, -gamma}};
  if (!std::isfinite(cls.duration)) return PiecewiseTrajectory({head});
  const double end = cls.start + cls.duration;
  Segment tail{end, head.value_at(end), ExponentialApproach{unsubsidised, -gamma}};
  return PiecewiseTrajectory({head, tail});
}

std::optional<double> noext_required_duration(const AffinityDistribution& dist, double cost,
                                              double gamma, double level, double y0,
                                              double target) {
  if (target == y0) return 0.0;
  const double f = dist.ccdf(cost - level);
  const bool reachable = (y0 < target && target < f) || (f < target && target < y0);
  if (!reachable) return std::nullopt;
  return std::log((f - y0) / (f - target)) / gamma;
}

double noext_subsidy_cost(const AffinityDistribution& dist, double cost, double gamma,
                          const ConstantLevelSubsidy& cls, double y0) {
  cls.validate(cost);
  if (cls.level == 0.0 || cls.duration == 0.0) return 0.0;
  const double f = dist.ccdf(cost - cls.level);
  const double settled = -std::expm1(-gamma * cls.duration);
  return cls.level * (f * cls.duration - (f - y0) * settled / gamma);
}

std::optional<double> noext_cost_at_target(const AffinityDistribution& dist, double cost,
                                           double gamma, double level, double y0,
                                           double target) {
  const auto duration = noext_required_duration(dist, cost, gamma, level, y0, target);
  if (!duration) return std::nullopt;
  const double f = dist.ccdf(cost - level);
  return level * (f * *duration - (target - y0) / gamma);
}

bool noext_cost_decreasing_condition(const AffinityDistribution& dist, double cost,
                                     double level) {
  const double u = cost - level;
  return dist.ccdf(u) < level * dist.density(u);
}

bool noext_cost_decreasing_condition(const UniformAffinity& dist, double cost, double level) {
  // Below the support the density vanishes and S grows linearly in s.
  return dist.upper() < cost && cost - level >= dist.lower();
}

// --- with externality --------------------------------------------------------

PiecewiseTrajectory subsidized_trajectory(const ModelParams& p, const ConstantLevelSubsidy& cls,
                                          double y0) {
  p.validate();
  cls.validate(p.cost);
  if (p.externality == 0.0) {
    return noext_cls_trajectory(UniformAffinity(p.u_min, p.u_max), p.cost, p.gamma, cls, y0);
  }
  const double t0 = cls.start;
  if (cls.duration == 0.0 || cls.level == 0.0) return unsubsidized_trajectory(p, t0, y0);
  const PiecewiseTrajectory head =
      unsubsidized_trajectory(p.with_cost(p.cost - cls.level), t0, y0);
  if (!std::isfinite(cls.duration)) return head;
  const double end = t0 + cls.duration;
  const PiecewiseTrajectory tail = unsubsidized_trajectory(p, end, clamp_unit(eval(head, end)));
  return head.then(end, tail);
}

void require_bistable(const ModelParams& p) {
  p.validate();
  const double top = p.u_min + p.externality;
  if (!(p.u_max <= p.cost && p.cost <= top)) {
    throw AssumptionViolation(
        "two stable equilibria require u_max <= cost <= u_min + externality (got u_max=" +
        fmt_num(p.u_max) + ", cost=" + fmt_num(p.cost) + ", u_min + e=" + fmt_num(top) + ")");
  }
}

void require_bistable_below_knee(const ModelParams& p, double y0) {
  require_bistable(p);
  const double knee = interior_equilibrium(p.cost, p);
  if (!(y0 >= 0.0 && y0 < knee)) {
    throw AssumptionViolation("initial level must satisfy 0 <= y0 < x°(c) (got y0=" +
                              fmt_num(y0) + ", x°(c)=" + fmt_num(knee) + ")");
  }
}

double full_subsidy_cost(const ModelParams& p, double y0, double duration) {
  if (duration == 0.0) return 0.0;
  return p.cost * (duration + (1.0 - y0) * std::expm1(-p.gamma * duration) / p.gamma);
}

FullSubsidyReport full_subsidy_analysis(const ModelParams& p, double t0, double y0,
                                        double duration) {
  require_bistable_below_knee(p, y0);
  if (p.u_min < 0.0) {
    throw AssumptionViolation("full subsidy analysis requires u_min >= 0 (got u_min=" +
                              fmt_num(p.u_min) + ")");
  }
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw InvalidParameters("subsidy duration must be finite and >= 0");
  }

  const double g = p.gamma;
  const double e = p.externality;
  const double knee = interior_equilibrium(p.cost, p);
  const double lo = band_low(p.cost, p);
  const double hi = band_high(p.cost, p);
  const double a = band_ode(p.cost, p).slope;

  const double t_low = std::log((1.0 - y0) * e / (p.u_max + e - p.cost)) / g;
  const double t_knee = std::log((1.0 - y0) / (1.0 - knee)) / g;
  const double t_high = std::log((1.0 - y0) * e / (p.u_min + e - p.cost)) / g;

  int row = 0;
  double y_end = 0.0;
  if (duration <= t_low) {
    row = 1;
    y_end = duration == t_low ? lo : 1.0 - (1.0 - y0) * std::exp(-g * duration);
  } else if (duration <= t_knee) {
    row = 2;
    y_end = duration == t_knee ? knee : 1.0 - (1.0 - y0) * std::exp(-g * duration);
  } else if (duration < t_high) {
    row = 3;
    y_end = 1.0 - (1.0 - y0) * std::exp(-g * duration);
  } else {
    row = 4;
    y_end = duration == t_high ? hi : 1.0 - (1.0 - y0) * std::exp(-g * duration);
  }

  std::vector<Segment> segments;
  const double end = t0 + duration;
  if (duration > 0.0) segments.push_back({t0, y0, ExponentialApproach{1.0, -g}});
  double final_level = 0.0;
  switch (row) {
    case 1:
      segments.push_back({end, y_end, ExponentialApproach{0.0, -g}});
      break;
    case 2: {
      segments.push_back({end, y_end, ExponentialApproach{knee, g * a}});
      if (y_end == knee) {
        final_level = knee;
        break;
      }
      if (const auto exit = that(lo, 0.0, y_end, p.cost, p)) {
        segments.push_back({end + *exit, lo, ExponentialApproach{0.0, -g}});
      }
      break;
    }
    case 3: {
      segments.push_back({end, y_end, ExponentialApproach{knee, g * a}});
      if (const auto exit = that(hi, 0.0, y_end, p.cost, p)) {
        segments.push_back({end + *exit, hi, ExponentialApproach{1.0, -g}});
      }
      final_level = 1.0;
      break;
    }
    default:
      // Above the band the unsubsidised dynamics continue the same rise to 1.
      if (duration == 0.0) segments.push_back({t0, y0, ExponentialApproach{1.0, -g}});
      final_level = 1.0;
      break;
  }

  return FullSubsidyReport{t_low,
                           t_knee,
                           t_high,
                           duration,
                           row,
                           PiecewiseTrajectory(std::move(segments)),
                           final_level,
                           full_subsidy_cost(p, y0, duration)};
}

// --- minimum-duration subsidy ------------------------------------------------

SubsidyBounds subsidy_bounds(const ModelParams& p, double y0) {
  require_bistable(p);
  const double e = p.externality;
  SubsidyBounds b;
  b.below_band = (p.cost - p.u_max) / e - y0;
  b.full = p.cost / e;
  const double factor = 1.0 - p.affinity_width() / e;
  if (factor == 0.0) {
    // u_max == u_min + e forces c == u_max; x°(c) is indeterminate but the
    // minimum subsidy vanishes with the leading factor.
    b.minimum = 0.0;
    b.knee_at_top = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double knee = interior_equilibrium(p.cost, p);
    // (1 - w/e)(x° - y0) rearranged so that minimum >= below_band survives rounding.
    b.minimum = b.below_band + y0 * p.affinity_width() / e;
    b.knee_at_top = (p.cost - p.u_min) / e - knee;
  }
  b.start_at_top = (p.cost - p.u_min) / e - y0;
  return b;
}

double min_subsidy(const ModelParams& p, double y0) {
  require_bistable(p);
  if (p.affinity_width() != p.externality) require_bistable_below_knee(p, y0);
  else if (!(y0 >= 0.0)) throw AssumptionViolation("initial level must satisfy y0 >= 0");
  return p.externality * subsidy_bounds(p, y0).minimum;
}

bool subsidy_is_feasible(const ModelParams& p, double y0, double level) {
  return level / p.externality > subsidy_bounds(p, y0).minimum;
}

std::string_view to_string(CostRegime r) {
  switch (r) {
    case CostRegime::kStalledBelowBand: return "stalled_below_band";
    case CostRegime::kStalledInBand: return "stalled_in_band";
    case CostRegime::kBandRise: return "band_rise";
    case CostRegime::kBandThenSaturate: return "band_then_saturate";
    case CostRegime::kSaturated: return "saturated";
  }
  return "unknown";
}

std::string_view to_string(CostMethod m) {
  return m == CostMethod::kClosedForm ? "closed_form" : "quadrature";
}

CostRegime cost_regime(const ModelParams& p, double y0, double level) {
  const SubsidyBounds b = subsidy_bounds(p, y0);
  const double r = level / p.externality;
  if (r <= b.minimum) {
    return r <= b.below_band ? CostRegime::kStalledBelowBand : CostRegime::kStalledInBand;
  }
  if (r <= b.knee_at_top) return CostRegime::kBandRise;
  if (r <= b.start_at_top) return CostRegime::kBandThenSaturate;
  return CostRegime::kSaturated;
}

std::optional<double> min_duration(const ModelParams& p, double y0, double level) {
  require_bistable_below_knee(p, y0);
  require_level_in_range(p, level);
  const double knee = interior_equilibrium(p.cost, p);
  const double subsidised = p.cost - level;
  switch (cost_regime(p, y0, level)) {
    case CostRegime::kStalledBelowBand:
    case CostRegime::kStalledInBand:
      return std::nullopt;
    case CostRegime::kBandRise:
      return that(knee, 0.0, y0, subsidised, p);
    case CostRegime::kBandThenSaturate: {
      const double top = band_high(subsidised, p);
      const auto to_top = that(top, 0.0, y0, subsidised, p);
      if (!to_top) return std::nullopt;
      return *to_top + std::log((1.0 - top) / (1.0 - knee)) / p.gamma;
    }
    case CostRegime::kSaturated:
      return std::log((1.0 - y0) / (1.0 - knee)) / p.gamma;
  }
  return std::nullopt;
}

PiecewiseTrajectory min_duration_trajectory(const ModelParams& p, double t0, double y0,
                                            double level) {
  require_bistable_below_knee(p, y0);
  require_level_in_range(p, level);
  const CostRegime regime = cost_regime(p, y0, level);
  if (regime == CostRegime::kStalledBelowBand || regime == CostRegime::kStalledInBand) {
    throw InfeasibleSubsidy("subsidy level " + fmt_num(level) +
                            " does not exceed the minimum subsidy " +
                            fmt_num(min_subsidy(p, y0)));
  }
  const double g = p.gamma;
  const double subsidised = p.cost - level;
  if (regime == CostRegime::kSaturated) {
    return PiecewiseTrajectory({Segment{t0, y0, ExponentialApproach{1.0, -g}}});
  }
  const Segment band{t0, y0,
                     ExponentialApproach{interior_equilibrium(subsidised, p),
                                         g * band_ode(subsidised, p).slope}};
  if (regime == CostRegime::kBandRise) return PiecewiseTrajectory({band});

  const double top = band_high(subsidised, p);
  const auto to_top = that(top, 0.0, y0, subsidised, p);
  if (!to_top) throw InfeasibleSubsidy("subsidised path never reaches the band top");
  const Segment rise{t0 + *to_top, top, ExponentialApproach{1.0, -g}};
  if (*to_top == 0.0) return PiecewiseTrajectory({rise});
  return PiecewiseTrajectory({band, rise});
}

CostEstimate min_duration_cost(const ModelParams& p, double y0, double level) {
  require_bistable_below_knee(p, y0);
  require_level_in_range(p, level);
  CostEstimate out;
  if (level == 0.0) {
    out.value = 0.0;
    return out;
  }
  const double g = p.gamma;
  const double s = level;
  const double knee = interior_equilibrium(p.cost, p);
  const double subsidised = p.cost - s;

  switch (cost_regime(p, y0, s)) {
    case CostRegime::kStalledBelowBand:
      out.value = s * y0 / g;
      break;
    case CostRegime::kStalledInBand: {
      const double knee_s = interior_equilibrium(subsidised, p);
      const double low_s = band_low(subsidised, p);
      if (!(y0 < knee_s)) break;  // parked on the unstable point forever
      const double k = band_time_scale(p);
      out.value = s / g *
                  (k * (knee_s * std::log((knee_s - low_s) / (knee_s - y0)) - (y0 - low_s)) +
                   low_s);
      break;
    }
    case CostRegime::kBandRise: {
      const double knee_s = interior_equilibrium(subsidised, p);
      const double k = band_time_scale(p);
      // x log x -> 0 as the subsidised knee meets y0 = 0.
      double crawl = 0.0;
      if (knee_s != 0.0) {
        if (!(y0 > knee_s)) break;
        crawl = knee_s * std::log((knee - knee_s) / (y0 - knee_s));
      }
      out.value = s / g * k * (crawl + knee - y0);
      break;
    }
    case CostRegime::kBandThenSaturate: {
      // No closed form on this interval; integrate the exact path per segment.
      // At rounding distance above the minimum the band top is never reached.
      const auto total = min_duration(p, y0, s);
      if (!total) break;
      const PiecewiseTrajectory path = min_duration_trajectory(p, 0.0, y0, s);
      std::vector<double> cuts{0.0};
      for (double b : path.breakpoints()) {
        if (b > 0.0 && b < *total) cuts.push_back(b);
      }
      cuts.push_back(*total);
      double integral = 0.0;
      double error = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Segment& seg = path.active_segment(cuts[i]);
        const auto piece = adaptive_simpson([&seg](double t) { return seg.value_at(t); },
                                            cuts[i], cuts[i + 1], kQuadratureTol);
        integral += piece.value;
        error += piece.error_estimate;
      }
      out.value = s * integral;
      out.method = CostMethod::kQuadrature;
      out.error_bound = s * error;
      break;
    }
    case CostRegime::kSaturated:
      out.value = s / g * (std::log((1.0 - y0) / (1.0 - knee)) - (knee - y0));
      break;
  }
  return out;
}

// --- sweeps -------------------------------------------------------------------

ParetoFrontier pareto_frontier(std::span<const SubsidySweepRow> rows) {
  std::vector<const SubsidySweepRow*> feasible;
  for (const SubsidySweepRow& r : rows) {
    if (r.feasible && r.duration && r.cost.value) feasible.push_back(&r);
  }
  std::sort(feasible.begin(), feasible.end(), [](const auto* a, const auto* b) {
    if (*a->duration != *b->duration) return *a->duration < *b->duration;
    if (*a->cost.value != *b->cost.value) return *a->cost.value < *b->cost.value;
    return a->level < b->level;
  });
  ParetoFrontier out;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const SubsidySweepRow* r : feasible) {
    SubsidySweepRow copy = *r;
    if (*r->cost.value < best_cost) {
      best_cost = *r->cost.value;
      copy.on_frontier = true;
      out.frontier.push_back(copy);
    } else {
      copy.on_frontier = false;
      out.dominated.push_back(copy);
    }
  }
  return out;
}

std::vector<double> default_sweep_grid(const ModelParams& p, double y0, int points) {
  const SubsidyBounds b = subsidy_bounds(p, y0);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points) + 4);
  for (int i = 0; i < points; ++i) {
    grid.push_back(points == 1 ? 0.0 : p.cost * i / (points - 1));
  }
  if (points > 1) grid.back() = p.cost;
  for (double r : {b.below_band, b.minimum, b.knee_at_top, b.start_at_top}) {
    if (!(r > 0.0 && r < b.full)) continue;
    // The bound itself belongs to the interval below it.
    double s = r * p.externality;
    while (s / p.externality > r) s = std::nextafter(s, 0.0);
    grid.push_back(s);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<IntervalSignReport> cost_sign_pattern(const ModelParams& p, double y0,
                                                  std::span<const SubsidySweepRow> rows) {
  const SubsidyBounds b = subsidy_bounds(p, y0);
  // Interval k spans (edges[k-1], edges[k]]; edges are made monotone so an
  // empty interval has zero width.
  std::vector<double> edges{0.0, b.below_band, b.minimum, b.knee_at_top, b.start_at_top, b.full};
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (std::isnan(edges[i])) edges[i] = edges[i - 1];
    edges[i] = std::clamp(edges[i], edges[i - 1], b.full);
  }

  std::vector<IntervalSignReport> reports(5);
  std::vector<int> first_sign(5, 0);
  std::vector<int> last_sign(5, 0);
  for (int k = 0; k < 5; ++k) {
    reports[k].interval = k + 1;
    reports[k].lower = edges[k];
    reports[k].upper = edges[k + 1];
  }
  const auto interval_of = [&](double r) {
    for (int k = 0; k < 5; ++k) {
      if (r <= edges[k + 1]) return k;
    }
    return 4;
  };

  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const SubsidySweepRow& lo = rows[i];
    const SubsidySweepRow& hi = rows[i + 1];
    if (!lo.cost.value || !hi.cost.value) continue;
    // S jumps at the minimum subsidy; that step is not a slope sample.
    if (lo.feasible != hi.feasible) continue;
    const int k = interval_of(hi.normalized);
    if (lo.normalized < edges[k] || hi.normalized <= lo.normalized) continue;
    if (k == 0 && lo.normalized < 0.0) continue;
    const double delta = *hi.cost.value - *lo.cost.value;
    const int sign = delta > 0.0 ? 1 : (delta < 0.0 ? -1 : 0);
    IntervalSignReport& rep = reports[k];
    if (sign > 0) ++rep.positive;
    if (sign < 0) ++rep.negative;
    if (sign == 0) ++rep.zero;
    if (sign != 0) {
      if (first_sign[k] == 0) first_sign[k] = sign;
      if (last_sign[k] != 0 && sign != last_sign[k]) ++rep.sign_changes;
      last_sign[k] = sign;
    }
  }

  for (IntervalSignReport& rep : reports) {
    switch (rep.interval) {
      case 1:
        // dS/ds = y0 / gamma on this interval.
        rep.matches = y0 > 0.0 ? (rep.negative == 0 && rep.zero == 0)
                               : (rep.negative == 0 && rep.positive == 0);
        break;
      case 2:
      case 5:
        rep.matches = rep.negative == 0 && rep.zero == 0;
        break;
      case 3:
        rep.matches = rep.positive == 0 && rep.zero == 0;
        break;
      case 4:
        // Decreasing, then increasing: at most one change, from - to +.
        rep.matches = rep.sign_changes <= 1 && rep.zero == 0 &&
                      !(rep.sign_changes == 1 && first_sign[3] > 0);
        break;
    }
  }
  return reports;
}

SweepResult sweep(const ModelParams& p, double y0, std::span<const double> grid) {
  require_bistable_below_knee(p, y0);
  SweepResult out;
  out.rows.reserve(grid.size());
  for (double s : grid) {
    SubsidySweepRow row;
    row.level = s;
    row.normalized = s / p.externality;
    row.regime = cost_regime(p, y0, s);
    row.feasible = subsidy_is_feasible(p, y0, s);
    row.duration = row.feasible ? min_duration(p, y0, s) : std::nullopt;
    row.cost = min_duration_cost(p, y0, s);
    if (row.feasible && !row.duration) {
      // Rounding-level distance above the minimum: the knee is never reached.
      row.feasible = false;
      row.cost = CostEstimate{};
    }
    out.rows.push_back(row);
  }

  out.frontier = pareto_frontier(out.rows);
  for (SubsidySweepRow& row : out.rows) {
    for (const SubsidySweepRow& f : out.frontier.frontier) {
      if (f.level == row.level) row.on_frontier = true;
    }
  }

  std::vector<SubsidySweepRow> sorted = out.rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.level < b.level; });
  out.sign_pattern = cost_sign_pattern(p, y0, sorted);

  const IntervalSignReport& fourth = out.sign_pattern[3];
  double best = std::numeric_limits<double>::infinity();
  for (const SubsidySweepRow& row : sorted) {
    if (!row.cost.value || row.normalized < fourth.lower || row.normalized > fourth.upper) continue;
    if (fourth.upper <= fourth.lower) break;
    if (*row.cost.value < best) {
      best = *row.cost.value;
      out.cost_turning_point = row.level;
    }
  }
  return out;
}

}  // namespace adoptsub
