#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "adoptsub/affinity.hpp"
#include "adoptsub/model_params.hpp"
#include "adoptsub/trajectory.hpp"

namespace adoptsub {

// Cost reduction of size `level` applied on [start, start + duration].
struct ConstantLevelSubsidy {
  double level = 0.0;
  double duration = 0.0;
  double start = 0.0;

  /// Throws InvalidParameters unless 0 <= level <= cost and duration >= 0.
  void validate(double cost) const;
};

// ---------------------------------------------------------------------------
// No externality (e = 0), arbitrary continuous affinity distribution.

/// Two exponential phases: toward ccdf(c - s) while subsidised, then toward
/// ccdf(c). Breakpoint at cls.start + cls.duration.
PiecewiseTrajectory noext_cls_trajectory(const AffinityDistribution& dist, double cost,
                                         double gamma, const ConstantLevelSubsidy& cls,
                                         double y0);

/// Subsidy duration T(s, y) needed to move from y0 to `target`; nullopt unless
/// the target lies strictly between y0 and ccdf(c - s). T = 0 when target == y0.
std::optional<double> noext_required_duration(const AffinityDistribution& dist, double cost,
                                              double gamma, double level, double y0,
                                              double target);

/// Aggregate subsidy cost S(s, T) in closed form.
double noext_subsidy_cost(const AffinityDistribution& dist, double cost, double gamma,
                          const ConstantLevelSubsidy& cls, double y0);

/// S(s, T(s, y)) by substituting the required duration; nullopt when
/// infeasible.
std::optional<double> noext_cost_at_target(const AffinityDistribution& dist, double cost,
                                           double gamma, double level, double y0,
                                           double target);

/// Sufficient condition ccdf(c - s) < s * density(c - s) for dS/ds < 0.
bool noext_cost_decreasing_condition(const AffinityDistribution& dist, double cost,
                                     double level);
/// Uniform affinities: the condition reduces to u_max < c, for s <= c - u_min.
bool noext_cost_decreasing_condition(const UniformAffinity& dist, double cost, double level);

// ---------------------------------------------------------------------------
// With externality, uniform affinities.

/// Dynamics at cost c - s on [t0, t0 + T], then at cost c from the state
/// reached at t0 + T.
PiecewiseTrajectory subsidized_trajectory(const ModelParams& params,
                                          const ConstantLevelSubsidy& cls, double y0);

/// Throws AssumptionViolation unless u_max <= c <= u_min + e.
void require_bistable(const ModelParams& params);
/// Throws AssumptionViolation unless bistable and 0 <= y0 < x°(c).
void require_bistable_below_knee(const ModelParams& params, double y0);

// Full-cost subsidy (s = c) of duration T.
struct FullSubsidyReport {
  double threshold_low = 0.0;   // T̄_M: reaches (c - u_max)/e; may be <= 0
  double threshold_knee = 0.0;  // T̄_°: reaches x°(c)
  double threshold_high = 0.0;  // T̄_m: reaches (c - u_min)/e
  double duration = 0.0;
  int post_subsidy_row = 0;  // 1..4, which duration interval contains T
  PiecewiseTrajectory trajectory;
  double final_level = 0.0;  // 0 or 1; x°(c) only when T hits T̄_° exactly
  double cost = 0.0;
};

/// Requires bistability, 0 <= y0 < x°(c) and u_min >= 0 (so that a full
/// subsidy makes every user adopt).
FullSubsidyReport full_subsidy_analysis(const ModelParams& params, double t0, double y0,
                                        double duration);

/// Full-subsidy cost S(T) = c (T - (1 - y0)(1 - exp(-gamma T)) / gamma).
double full_subsidy_cost(const ModelParams& params, double y0, double duration);

// Minimum-duration subsidy: T = T̂(s), the first time the subsidised path
// reaches x°(c).

// Normalised subsidy s/e at the interval boundaries, ascending apart from
// below_band which may be negative.
struct SubsidyBounds {
  double below_band = 0.0;   // (c - u_max)/e - y0
  double minimum = 0.0;      // ŝ/e
  double knee_at_top = 0.0;  // (c - u_min)/e - x°(c)
  double start_at_top = 0.0; // (c - u_min)/e - y0
  double full = 0.0;         // c/e
};

SubsidyBounds subsidy_bounds(const ModelParams& params, double y0);

/// Minimum subsidy level ŝ; levels s <= ŝ leave the long-run outcome at 0.
double min_subsidy(const ModelParams& params, double y0);

bool subsidy_is_feasible(const ModelParams& params, double y0, double level);

enum class CostRegime {
  kStalledBelowBand = 1,  // s <= ŝ, y0 below the subsidised band
  kStalledInBand = 2,     // s <= ŝ, y0 inside the subsidised band
  kBandRise = 3,          // reaches x°(c) inside the subsidised band
  kBandThenSaturate = 4,  // leaves the band at its top, then saturates
  kSaturated = 5,         // starts above the subsidised band
};

std::string_view to_string(CostRegime r);

CostRegime cost_regime(const ModelParams& params, double y0, double level);

/// T̂(s), nullopt when s <= ŝ. Requires bistability and y0 < x°(c).
std::optional<double> min_duration(const ModelParams& params, double y0, double level);

/// Subsidised-phase path from (t0, y0) at cost c - s; valid on [t0, t0 + T̂(s)],
/// where it reaches x°(c). Throws InfeasibleSubsidy when s <= ŝ.
PiecewiseTrajectory min_duration_trajectory(const ModelParams& params, double t0, double y0,
                                            double level);

enum class CostMethod { kClosedForm, kQuadrature };

std::string_view to_string(CostMethod m);

struct CostEstimate {
  std::optional<double> value;  // nullopt: unbounded
  CostMethod method = CostMethod::kClosedForm;
  double error_bound = 0.0;     // quadrature only
};

/// S(s) under T = T̂(s). For s <= ŝ the subsidy runs forever and the cost is
/// that of the stalled path (unbounded on the knife edge y0 == x°(c - s)).
CostEstimate min_duration_cost(const ModelParams& params, double y0, double level);

struct SubsidySweepRow {
  double level = 0.0;
  double normalized = 0.0;
  bool feasible = false;
  CostRegime regime = CostRegime::kStalledBelowBand;
  std::optional<double> duration;  // T̂(s)
  CostEstimate cost;
  bool on_frontier = false;
};

struct ParetoFrontier {
  std::vector<SubsidySweepRow> frontier;  // ascending in duration
  std::vector<SubsidySweepRow> dominated;
};

/// Non-dominated feasible rows in (duration, cost). Ties in both keep the
/// smallest level.
ParetoFrontier pareto_frontier(std::span<const SubsidySweepRow> rows);

// Observed sign of finite differences of S(s) on one interval between
// consecutive SubsidyBounds.
struct IntervalSignReport {
  int interval = 0;  // 1..5
  double lower = 0.0;
  double upper = 0.0;  // normalised s/e
  int positive = 0;
  int negative = 0;
  int zero = 0;
  int sign_changes = 0;
  bool matches = true;  // agrees with the predicted sign pattern
};

struct SweepResult {
  std::vector<SubsidySweepRow> rows;
  ParetoFrontier frontier;
  std::vector<IntervalSignReport> sign_pattern;
  std::optional<double> cost_turning_point;  // s̃, grid minimiser of S on interval 4
};

/// `points` evenly spaced levels on [0, c] plus the interior bounds that fall
/// inside, sorted and deduplicated.
std::vector<double> default_sweep_grid(const ModelParams& params, double y0, int points = 512);

/// One row per grid level, in grid order. Requires bistability and y0 < x°(c).
SweepResult sweep(const ModelParams& params, double y0, std::span<const double> grid);

/// Sign-pattern analysis of S(s) over sorted rows.
std::vector<IntervalSignReport> cost_sign_pattern(const ModelParams& params, double y0,
                                                  std::span<const SubsidySweepRow> rows);

}  // namespace adoptsub
