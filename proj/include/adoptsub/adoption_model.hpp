#pragma once

#include <optional>
#include <vector>

#include "adoptsub/model_params.hpp"

namespace adoptsub {

enum class Stability { kStable, kUnstable };

const char* to_string(Stability s);

struct Equilibrium {
  double level = 0.0;
  Stability stability = Stability::kStable;
};

// Equilibrium structure of the uniform-affinity model. case_id follows the
// four orderings of c against u_max and u_min + e, first matching row wins:
//   1: max(u_max, u_min + e) <= c       -> {0}
//   2: u_min + e <= c <= u_max          -> {x°(c)}
//   3: u_max <= c <= u_min + e          -> {0, x°(c), 1}
//   4: c <= min(u_max, u_min + e)       -> {1}
// The equilibria list is computed from h directly, so on the measure-zero
// boundaries between rows it may differ from the row's nominal set.
struct EquilibriumReport {
  int case_id = 0;
  std::vector<Equilibrium> equilibria;  // ascending by level
  std::optional<double> interior;       // x°(c) when defined
  std::optional<double> band_low;       // (c - u_max) / e, e > 0 only
  std::optional<double> band_high;      // (c - u_min) / e, e > 0 only
};

/// Fraction of users with positive net utility at adoption level x,
/// h(x) = P(U + e x - c > 0). Defined on all of R.
double would_adopt(double x, const ModelParams& params);

/// x°(c') = (u_max - c') / (u_max - (u_min + e)), unclamped.
/// Throws SingularParameters when u_max == u_min + e.
double interior_equilibrium(double effective_cost, const ModelParams& params);

/// Lower and upper edges of the band where h is strictly between 0 and 1.
/// Requires e > 0.
double band_low(double effective_cost, const ModelParams& params);
double band_high(double effective_cost, const ModelParams& params);

/// Row of the equilibrium table selected by first match (see EquilibriumReport).
int equilibrium_case(const ModelParams& params);

EquilibriumReport classify_equilibria(const ModelParams& params);

/// Stability from the slope of h at x_bar, one-sided at band edges. Only the
/// sides lying inside [0, 1] are considered. Throws NotAnEquilibrium when
/// |h(x_bar) - x_bar| > 1e-9.
Stability stability_of(double x_bar, const ModelParams& params);

}  // namespace adoptsub
